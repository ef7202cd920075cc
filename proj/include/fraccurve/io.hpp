#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "fraccurve/funcspace.hpp"

namespace fraccurve {

/// Coefficient CSV ("t,c1,...,cp", %.17g) plus a JSON sidecar at path + ".json"
/// holding the basis. read_series(write_series(s)) reproduces s bit for bit.
void write_series(const std::filesystem::path& path, const FunctionalSeries& series);
[[nodiscard]] FunctionalSeries read_series(const std::filesystem::path& path);

/// Raw curves on a common grid.
struct GridData {
    std::vector<double> grid;  ///< ascending points in [0,1]
    Matrix values;             ///< T x G
};

/// Long format: header "t,x,value"; every t must carry the same set of x.
[[nodiscard]] GridData read_long_csv(const std::filesystem::path& path);

/// Wide format: header row of grid points, then one row of values per t.
[[nodiscard]] GridData read_wide_csv(const std::filesystem::path& path);

/// CSV of a matrix with the given column names, %.17g.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m, const std::vector<std::string>& header);

/// Writes to a temporary sibling and renames it into place.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

[[nodiscard]] std::string format_double(double v);

[[nodiscard]] nlohmann::json to_json(const Vector& v);
[[nodiscard]] nlohmann::json to_json(const Matrix& m);  ///< array of rows

}  // namespace fraccurve
