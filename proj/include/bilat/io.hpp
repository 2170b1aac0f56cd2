#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "bilat/hypothesis_tests.hpp"
#include "bilat/simulation.hpp"

namespace bilat {

inline constexpr const char* kVersion = "0.1.0";

// ---- table files: CSV with header "group,m0,m1,m2", '#' comments ----

FrequencyTable read_table_csv(std::istream& in, const std::string& name);
FrequencyTable read_table_file(const std::string& path);
std::string write_table_csv(const FrequencyTable& table);

// FNV-1a 64 digest of a file's bytes, as "fnv1a64:<hex>".
std::string file_digest(const std::string& path);

// ---- JSON report pieces ----

nlohmann::json fit_result_json(const FitResult& fr, const FrequencyTable& table);
nlohmann::json test_report_json(const TestReport& tr,
                                const FrequencyTable& table);
nlohmann::json sim_summary_json(const SimSummary& s);
nlohmann::json sweep_record_json(const SweepRecord& r);

// ---- spec parsing (JSON configs and CLI-style strings) ----

SimSpec sim_spec_from_json(const nlohmann::json& j);
SweepSpec sweep_spec_from_json(const nlohmann::json& j);
std::vector<TestMethod> parse_methods(const std::string& flag);  // "lr,score" / "all"

}  // namespace bilat
