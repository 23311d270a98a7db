#pragma once

#include "levilab/correction.hpp"
#include "levilab/verify.hpp"

#include <json.hpp>

#include <string>

namespace levilab {

using Json = nlohmann::json;

Json point_json(const CPoint& z);  // [[re, im], ...]
Json to_json(const InequalityReport& r, bool per_sample = true);
Json to_json(const CutoffReport& r);
Json to_json(const McNealResult& r);
Json to_json(const DFSearchResult& r);
Json to_json(const FactorProbe& r);
Json to_json(const CompareKReport& r);
Json to_json(const ChooseCResult& r);
Json to_json(const CutoffParams& p);
Json to_json(const FrameContinuation& f);
Json to_json(const StageRecord& s);
Json to_json(const Stratification& s);
/// Stages and summary; omits the sample cloud.
Json to_json(const CorrectionLedger& l);

/// Keys sorted, two-space indent, doubles as %.17g, non-finite doubles as
/// the strings "inf", "-inf" and "nan". Same value, same bytes.
std::string dump_json(const Json& j);

/// Columns point, direction, slack, stratum; coordinates joined by ';' as
/// x1;y1;x2;y2...
std::string report_csv(const InequalityReport& r);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace levilab
