#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "fraccurve/cointegration.hpp"
#include "fraccurve/funcspace.hpp"
#include "fraccurve/memest.hpp"

namespace fraccurve {

class CriticalValueTable;

struct PipelineConfig {
    double alpha = 0.5;
    double eta = 0.05;
    std::size_t q_max = 7;
    std::size_t K_offset = 2;
    RankStatistic statistic = RankStatistic::Max;
    std::size_t K_ratio = 7;
    double h_exponent = 0.3;
    std::size_t K_split = 7;
    double m_exponent = 0.65;
    std::size_t m = 0;  ///< 0: floor(1 + T^m_exponent)
    std::size_t L = 20;
    std::size_t J_d = 5;
    std::size_t J_db = 2;
    MemoryMethod d_method = MemoryMethod::Differenced;
    BasisKind direction_basis = BasisKind::ShiftedLegendre;
    double ci_level = 0.95;
    std::vector<std::size_t> score_indices;  ///< empty: 1, q_bar + 1, q_bar + q_db + 1 (within p)
    std::uint64_t seed = 0;

    void validate() const;
    [[nodiscard]] nlohmann::json to_json() const;
};

struct PipelineResult {
    nlohmann::json report;
    Matrix scores;  ///< T-1 x |indices|: <Z_t - Z_1, v_j>
    std::vector<std::size_t> score_indices;
};

/// d (proposed + single-eigenvector baseline), the sequential rank test with the
/// plug-in d, the eigenvalue-ratio dimension, the LRD/SRD split, d - b and the
/// principal-component score series. Random directions for d and d - b draw
/// from substreams (seed, 1) and (seed, 2).
[[nodiscard]] PipelineResult run_pipeline(const FunctionalSeries& series, const PipelineConfig& config,
                                          const CriticalValueTable& table);

/// JSON fragments shared by the pipeline and the single-step commands.
[[nodiscard]] nlohmann::json memory_json(const MemoryEstimate& est);
[[nodiscard]] nlohmann::json rank_test_json(const SequentialResult& result);
[[nodiscard]] nlohmann::json split_json(const LrdSrdSplit& split, std::size_t h, std::size_t K);
[[nodiscard]] nlohmann::json series_json(const FunctionalSeries& series);

/// Empty when the report matches the pipeline schema; otherwise one message per violation.
[[nodiscard]] std::vector<std::string> validate_pipeline_report(const nlohmann::json& report);

inline constexpr const char* kNoDominantSubspace = "no dominant subspace detected";

}  // namespace fraccurve
