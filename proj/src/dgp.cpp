#include "fraccurve/dgp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fraccurve/errors.hpp"
#include "fraccurve/fracdiff.hpp"

namespace fraccurve {

void DGPParams::validate() const {
    require(p >= 1, "dgp: p must be positive");
    require(q_d + q_db <= p, "dgp: q_d + q_db must not exceed p");
    require(head >= q_d + q_db && head <= p, "dgp: permutation head must cover the nonstationary and LRD directions");
    require(d > 0.5 && d < 1.5, "dgp: d must lie in (1/2, 3/2)");
    require(d_minus_b >= 0.0 && d_minus_b < 0.5, "dgp: d - b must lie in [0, 1/2)");
    require(arma_range >= 0.0 && arma_range < 1.0, "dgp: arma_range must lie in [0, 1)");
    require(innov_decay > 0.0 && std::isfinite(innov_decay), "dgp: innov_decay must be positive");
}

Vector arma11(double phi, double theta, std::size_t T, std::size_t burn_in, Rng& rng) {
    if (!(std::abs(phi) < 1.0)) fail(ErrorKind::InvalidArgument, "arma11: AR coefficient must satisfy |phi| < 1");
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector out(static_cast<Eigen::Index>(T));
    double prev = 0.0, prev_e = 0.0;
    for (std::size_t t = 0; t < T + burn_in; ++t) {
        const double e = normal(rng);
        const double a = phi * prev + e + theta * prev_e;
        prev = a;
        prev_e = e;
        if (t >= burn_in) out(static_cast<Eigen::Index>(t - burn_in)) = a;
    }
    return out;
}

DGPDraw gen_dgp(const DGPParams& params, std::size_t T, Rng& rng) {
    params.validate();
    require(T >= 10, "dgp: need T >= 10");
    const std::size_t p = params.p;
    const auto Te = static_cast<Eigen::Index>(T);
    std::uniform_real_distribution<double> coef(-params.arma_range, params.arma_range);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<std::size_t> perm(p);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(params.head), rng);
    std::shuffle(perm.begin() + static_cast<std::ptrdiff_t>(params.head), perm.end(), rng);

    // scores in the v-coordinates; column j belongs to v_{j+1}
    Matrix scores = Matrix::Zero(Te, static_cast<Eigen::Index>(p));
    const std::size_t lead = params.q_d + params.q_db;
    Matrix arma(Te, static_cast<Eigen::Index>(lead));
    for (std::size_t j = 0; j < lead; ++j) {
        const double phi = coef(rng);
        const double theta = coef(rng);
        arma.col(static_cast<Eigen::Index>(j)) = arma11(phi, theta, T, params.burn_in, rng);
    }
    const auto qd = static_cast<Eigen::Index>(params.q_d);
    const auto qdb = static_cast<Eigen::Index>(params.q_db);
    if (qd > 0) scores.leftCols(qd) = frac_filter(Matrix(arma.leftCols(qd)), -params.d);
    if (qdb > 0) scores.middleCols(qd, qdb) = frac_filter(Matrix(arma.middleCols(qd, qdb)), -params.d_minus_b);

    const std::size_t s = p - lead;
    if (s > 0) {
        const auto se = static_cast<Eigen::Index>(s);
        Matrix A = Matrix::Zero(se, se), B = Matrix::Zero(se, se);
        for (Eigen::Index j = 0; j < se; ++j)
            for (Eigen::Index k = 0; k < se; ++k)
                if (std::abs(j - k) <= static_cast<Eigen::Index>(params.band)) {
                    A(j, k) = coef(rng);
                    B(j, k) = coef(rng);
                }
        const std::size_t rank = std::min(params.innov_rank, s);
        Vector sd = Vector::Zero(se);
        for (std::size_t j = 0; j < rank; ++j)
            sd(static_cast<Eigen::Index>(j)) = std::sqrt(std::pow(params.innov_decay, static_cast<double>(j)));
        Vector x = Vector::Zero(se), e_prev = Vector::Zero(se), e(se);
        for (std::size_t t = 0; t < T + params.burn_in; ++t) {
            for (Eigen::Index j = 0; j < se; ++j) e(j) = j < static_cast<Eigen::Index>(rank) ? sd(j) * normal(rng) : 0.0;
            x = A * x + e + B * e_prev;
            e_prev = e;
            if (t >= params.burn_in) scores.block(static_cast<Eigen::Index>(t - params.burn_in), lead, 1, se) = x.transpose();
        }
    }

    // v_j is Fourier function perm[j-1]; coefficient matrix in the Fourier basis
    Matrix coeffs = Matrix::Zero(Te, static_cast<Eigen::Index>(p));
    Matrix V = Matrix::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    for (std::size_t j = 0; j < p; ++j) {
        coeffs.col(static_cast<Eigen::Index>(perm[j])) = scores.col(static_cast<Eigen::Index>(j));
        V(static_cast<Eigen::Index>(perm[j]), static_cast<Eigen::Index>(j)) = 1.0;
    }
    return DGPDraw{FunctionalSeries(std::move(coeffs), Basis(BasisKind::Fourier, p), "dgp"),
                   Projection::onto(V.leftCols(qd), p), Projection::onto(V.middleCols(qd, qdb), p), std::move(perm)};
}

}  // namespace fraccurve
