#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fraccurve/funcspace.hpp"

namespace fraccurve {

enum class Gender { Female, Male, Total };

const char* to_string(Gender g) noexcept;
Gender gender_from_string(const std::string& name);

/// Mx_1x1-style mortality table. Missing cells ('.') are NaN.
struct HMDTable {
    std::vector<int> years;
    std::vector<int> ages;  ///< contiguous from 0; "110+" is 110
    Matrix female, male, total;  ///< years x ages

    [[nodiscard]] const Matrix& rates(Gender g) const;
};

/// Whitespace-delimited file with a "Year Age Female Male Total" header line;
/// lines before the header are ignored.
[[nodiscard]] HMDTable read_hmd(const std::filesystem::path& path);

/// Missing or nonpositive rates are linearly interpolated along age between
/// the nearest positive neighbours, and filled with the nearest positive value
/// at the boundary. A year without any positive rate is rejected.
[[nodiscard]] Matrix fill_rates(const Matrix& rates, const std::vector<int>& years);

/// log of the filled rates on the grid age / 110, projected onto the basis.
[[nodiscard]] FunctionalSeries hmd_series(const HMDTable& table, Gender g, const Basis& basis);

[[nodiscard]] FunctionalSeries import_hmd(const std::filesystem::path& path, Gender g, const Basis& basis);

}  // namespace fraccurve
