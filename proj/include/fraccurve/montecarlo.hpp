#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "fraccurve/dgp.hpp"
#include "fraccurve/memest.hpp"

namespace fraccurve {

class CriticalValueTable;

enum class McTable { T1, T2, T3, T4, T5, SizePower };

const char* to_string(McTable table) noexcept;
McTable mc_table_from_string(const std::string& name);

struct MCConfig {
    McTable table = McTable::T1;
    std::size_t reps = 500;
    std::vector<std::size_t> T_list{200, 350, 500, 1000};
    std::uint64_t seed = 42;
    DGPParams dgp;

    // rank test (T1, SizePower)
    std::size_t q_max = 4;
    double alpha = 0.5;
    double eta = 0.05;
    std::size_t K_ratio = 0;  ///< K of the eigenvalue-ratio estimator in T1; 0: q_max
    std::size_t K_size = 4;   ///< K of the size and power tests

    // LRD split (T2)
    double h_exponent = 0.4;
    std::size_t K_split = 4;

    // memory estimators (T1 plug-in, T3, T4, T5)
    MemoryMethod d_method = MemoryMethod::Differenced;
    BasisKind direction_basis = BasisKind::ShiftedLegendre;
    double m_exponent = 0.65;
    std::size_t L = 20;
    std::size_t J_d = 5;
    std::size_t J_db = 2;
    double ci_level = 0.95;

    void validate() const;
};

/// One table entry with its Monte Carlo standard error.
struct MCCell {
    std::string metric;
    std::string method;
    std::size_t T = 0;
    double value = 0.0;
    double se = 0.0;
    std::size_t n = 0;  ///< replications that entered the cell
};

struct MCReport {
    MCConfig config;
    std::vector<MCCell> cells;
    std::vector<std::size_t> failed;  ///< per T: replications dropped after a data error
    nlohmann::json provenance;

    [[nodiscard]] const MCCell& cell(const std::string& metric, const std::string& method, std::size_t T) const;
    /// Wide layout: one row per (metric, method), value and se columns per T.
    [[nodiscard]] std::string to_csv() const;
};

/// Runs every replication of the configured table. Replication r at sample size
/// T draws from substream (seed, T, r); replications run in parallel and are
/// reduced in replication order, so the report is independent of the thread
/// count. T1 and SizePower need a critical-value table covering q <= q_max.
[[nodiscard]] MCReport run_table(const MCConfig& config, const CriticalValueTable* table);

/// Interval score of [lo, hi] at level 1 - a for the value x.
[[nodiscard]] double interval_score(double lo, double hi, double x, double a);

}  // namespace fraccurve
