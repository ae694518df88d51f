#pragma once

#include <string>

#include "json.hpp"
#include "symloc/local_search.hpp"

namespace symloc {

// FNV-1a 64 digest of raw bytes, rendered as "fnv1a:<hex>".
std::string content_digest(const std::string& bytes);

nlohmann::ordered_json symmetry_to_json(const Mop& mop, const DesSymmetry& s,
                                        bool include_witness = true);
nlohmann::ordered_json detection_to_json(const Mop& mop, const DetectionReport& report,
                                         bool include_timings = false);
nlohmann::ordered_json exact_to_json(const Mop& mop, const ExactResult& result);
nlohmann::ordered_json search_to_json(const Mop& mop, const SearchResult& result);
nlohmann::ordered_json pipeline_to_json(const Mop& mop, const PipelineResult& result,
                                        bool include_timings = false);
nlohmann::ordered_json verification_to_json(const Mop& mop, const DesSymmetry& s,
                                            const VerificationReport& report);

const char* status_name(SolveStatus status);
const char* pipeline_status_name(PipelineResult::Status status);
const char* termination_name(Termination t);
const char* policy_kind_name(ClassifyPolicy::Kind kind);

}  // namespace symloc
