#pragma once

#include <cstddef>
#include <vector>

#include "fraccurve/covariance.hpp"
#include "fraccurve/funcspace.hpp"
#include "fraccurve/rng.hpp"

namespace fraccurve {

struct DGPParams {
    double d = 0.95;
    double d_minus_b = 0.3;
    std::size_t q_d = 3;
    std::size_t q_db = 2;
    std::size_t p = 25;
    double arma_range = 0.15;
    std::size_t band = 2;
    double innov_decay = 0.97;
    std::size_t innov_rank = 20;
    std::size_t burn_in = 200;
    /// v_1..v_head are a random permutation of the first `head` Fourier functions,
    /// the rest a random permutation of the remaining ones.
    std::size_t head = 5;

    void validate() const;
};

struct DGPDraw {
    FunctionalSeries series;
    Projection P;  ///< span of the nonstationary directions v_1..v_{q_d}
    Projection Q;  ///< span of the LRD directions v_{q_d+1}..v_{q_d+q_db}
    std::vector<std::size_t> permutation;  ///< permutation[j] = 0-based Fourier index of v_{j+1}
};

/// Z_t = Delta_+^{-d} sum_{j<=q_d} a^N_{j,t} v_j + Delta_+^{-(d-b)} sum_{LRD} a^L_{j,t} v_j + Xtilde_t
/// with ARMA(1,1) scores (coefficients U[-r, r], N(0,1) shocks, burn-in) and a
/// banded functional ARMA(1,1) Xtilde on the remaining directions driven by
/// innovations with variances decay^{j-1} on the first innov_rank of them.
/// Coefficients and the permutation are drawn from rng on every call.
[[nodiscard]] DGPDraw gen_dgp(const DGPParams& params, std::size_t T, Rng& rng);

/// One ARMA(1,1) path of length T after burn-in: a_t = phi a_{t-1} + e_t + theta e_{t-1}.
[[nodiscard]] Vector arma11(double phi, double theta, std::size_t T, std::size_t burn_in, Rng& rng);

}  // namespace fraccurve
