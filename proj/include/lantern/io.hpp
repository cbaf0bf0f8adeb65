#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lantern/analysis.hpp"
#include "lantern/mesh.hpp"

// Serialization used by the CLI: CSV tables, JSON mirrors, Wavefront OBJ
// and a self-contained SVG convergence plot. All emitters are
// deterministic: identical inputs yield identical bytes.

namespace lantern::io {

using ordered_json = nlohmann::ordered_json;

/// Shortest fixed-precision decimal: printf "%.{digits}g". At 17
/// significant digits the emitted string parses back to the same double.
[[nodiscard]] std::string format_double(double v, int digits = 17);

// --- mesh ---

void write_mesh_obj(std::ostream& os, const mesh::TriangleMesh& m,
                    int digits = 17);

[[nodiscard]] ordered_json mesh_to_json(const mesh::LanternParams& p,
                                        const mesh::TriangleMesh& m);

// --- convergence reports ---

inline constexpr const char* kLimitCsvHeader =
    "i,n,m,b_xy,b_xz,b_yz,asym_b_xy,asym_b_xz,asym_b_yz,angle_to_prev_rad,"
    "angle_to_target_rad";

/// One row per refinement step under the pinned header; NaN angles become
/// empty cells.
void write_limit_csv(std::ostream& os, const analysis::ConvergenceReport& r,
                     int digits = 17);

[[nodiscard]] ordered_json report_to_json(const analysis::ConvergenceReport& r);

// --- area tables ---

inline constexpr const char* kAreaCsvHeader = "i,n,m,area,projected_area";

struct AreaTableRow {
    int i = 0;
    std::int64_t n = 0;
    std::int64_t m = 0;
    double area = 0.0;
    std::optional<double> projected_area;
};

void write_area_csv(std::ostream& os, const std::vector<AreaTableRow>& rows,
                    int digits = 17);

[[nodiscard]] ordered_json area_to_json(const std::string& schedule_label,
                                        double a, double radius,
                                        const std::vector<AreaTableRow>& rows);

// --- probe ---

[[nodiscard]] ordered_json probe_to_json(const analysis::ProbeResult& pr,
                                         double tol_angle);

// --- SVG plot ---

struct PlotSeries {
    std::string label;
    std::vector<std::pair<int, double>> points;  // (i, angle in rad)
};

/// Self-contained SVG 1.1, fixed 800x500 viewBox: x-axis is i, y-axis is
/// log10 of the plane angle. Points with non-positive angles are dropped.
void write_svg_plot(std::ostream& os, const std::vector<PlotSeries>& series,
                    const std::string& y_label);

}  // namespace lantern::io
