#include "lantern/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace lantern::io {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                          "#9467bd", "#8c564b", "#e377c2"};

std::string csv_cell(double v, int digits) {
    return std::isnan(v) ? std::string{} : format_double(v, digits);
}

nlohmann::ordered_json json_number(double v) {
    if (std::isnan(v)) {
        return nullptr;
    }
    return v;
}

nlohmann::ordered_json bivector_to_json(const ga3::Bivector3& b) {
    return nlohmann::ordered_json::array({b.xy, b.xz, b.yz});
}

nlohmann::ordered_json schedule_to_json(const analysis::Schedule& s) {
    nlohmann::ordered_json j;
    switch (s.kind) {
        case analysis::ScheduleKind::m_eq_n:
            j["kind"] = "m=n";
            j["c_exp"] = nullptr;
            break;
        case analysis::ScheduleKind::m_eq_n_cubed:
            j["kind"] = "m=n^3";
            j["c_exp"] = nullptr;
            break;
        case analysis::ScheduleKind::m_eq_c_n_squared:
            j["kind"] = "m=c*n^2";
            j["c_exp"] = s.c_exp;
            break;
        case analysis::ScheduleKind::custom:
            j["kind"] = "custom";
            j["c_exp"] = nullptr;
            break;
    }
    return j;
}

// Fixed two-decimal SVG coordinate, deterministic across platforms.
std::string svg_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

std::string format_double(double v, int digits) {
    digits = std::clamp(digits, 6, 17);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

void write_mesh_obj(std::ostream& os, const mesh::TriangleMesh& m,
                    int digits) {
    for (const auto& v : m.vertices) {
        os << "v " << format_double(v.x, digits) << ' '
           << format_double(v.y, digits) << ' ' << format_double(v.z, digits)
           << '\n';
    }
    for (const auto& t : m.triangles) {
        os << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
    }
}

ordered_json mesh_to_json(const mesh::LanternParams& p,
                          const mesh::TriangleMesh& m) {
    ordered_json j;
    j["params"] = {{"radius", p.radius},
                   {"height", p.height},
                   {"n", p.n},
                   {"m", p.m}};
    auto vertices = ordered_json::array();
    for (const auto& v : m.vertices) {
        vertices.push_back(ordered_json::array({v.x, v.y, v.z}));
    }
    j["vertices"] = std::move(vertices);
    auto triangles = ordered_json::array();
    for (const auto& t : m.triangles) {
        triangles.push_back(ordered_json::array({t[0], t[1], t[2]}));
    }
    j["triangles"] = std::move(triangles);
    return j;
}

void write_limit_csv(std::ostream& os, const analysis::ConvergenceReport& r,
                     int digits) {
    os << kLimitCsvHeader << '\n';
    for (const auto& s : r.steps) {
        os << s.i << ',' << s.n << ',' << s.m << ','
           << format_double(s.pseudoscalar_exact.xy, digits) << ','
           << format_double(s.pseudoscalar_exact.xz, digits) << ','
           << format_double(s.pseudoscalar_exact.yz, digits) << ','
           << format_double(s.pseudoscalar_asymptotic.xy, digits) << ','
           << format_double(s.pseudoscalar_asymptotic.xz, digits) << ','
           << format_double(s.pseudoscalar_asymptotic.yz, digits) << ','
           << csv_cell(s.angle_to_prev, digits) << ','
           << csv_cell(s.angle_to_target, digits) << '\n';
    }
}

ordered_json report_to_json(const analysis::ConvergenceReport& r) {
    ordered_json j;
    j["schedule"] = schedule_to_json(r.schedule);
    j["a"] = r.a;
    j["i_min"] = r.i_min;
    j["i_max"] = r.i_max;
    auto steps = ordered_json::array();
    for (const auto& s : r.steps) {
        ordered_json step;
        step["i"] = s.i;
        step["n"] = s.n;
        step["m"] = s.m;
        step["pseudoscalar_exact"] = bivector_to_json(s.pseudoscalar_exact);
        step["pseudoscalar_asymptotic"] =
            bivector_to_json(s.pseudoscalar_asymptotic);
        step["area"] = s.area;
        step["projected_area"] = s.projected_area;
        step["angle_to_prev_rad"] = json_number(s.angle_to_prev);
        step["angle_to_target_rad"] = json_number(s.angle_to_target);
        steps.push_back(std::move(step));
    }
    j["steps"] = std::move(steps);
    j["limit_estimate"] = bivector_to_json(r.limit_estimate);
    j["cauchy_ok"] = r.cauchy_ok;
    j["target"] = r.target ? bivector_to_json(*r.target)
                           : ordered_json(nullptr);
    j["target_angle_rad"] = json_number(r.target_angle);
    return j;
}

void write_area_csv(std::ostream& os, const std::vector<AreaTableRow>& rows,
                    int digits) {
    os << kAreaCsvHeader << '\n';
    for (const auto& row : rows) {
        os << row.i << ',' << row.n << ',' << row.m << ','
           << format_double(row.area, digits) << ',';
        if (row.projected_area) {
            os << format_double(*row.projected_area, digits);
        }
        os << '\n';
    }
}

ordered_json area_to_json(const std::string& schedule_label, double a,
                          double radius,
                          const std::vector<AreaTableRow>& rows) {
    ordered_json j;
    j["schedule"] = schedule_label;
    j["a"] = a;
    j["radius"] = radius;
    auto arr = ordered_json::array();
    for (const auto& row : rows) {
        ordered_json r;
        r["i"] = row.i;
        r["n"] = row.n;
        r["m"] = row.m;
        r["area"] = row.area;
        r["projected_area"] = row.projected_area
                                  ? ordered_json(*row.projected_area)
                                  : ordered_json(nullptr);
        arr.push_back(std::move(r));
    }
    j["rows"] = std::move(arr);
    return j;
}

ordered_json probe_to_json(const analysis::ProbeResult& pr, double tol_angle) {
    ordered_json j;
    j["verdict"] =
        pr.verdict == analysis::Verdict::disagree ? "DISAGREE" : "AGREE";
    j["separation_angle_rad"] = pr.separation_angle;
    j["tol_angle_rad"] = tol_angle;
    j["report_a"] = report_to_json(pr.report_a);
    j["report_b"] = report_to_json(pr.report_b);
    return j;
}

void write_svg_plot(std::ostream& os, const std::vector<PlotSeries>& series,
                    const std::string& y_label) {
    constexpr double kWidth = 800.0;
    constexpr double kHeight = 500.0;
    constexpr double kLeft = 80.0;
    constexpr double kRight = 770.0;
    constexpr double kTop = 40.0;
    constexpr double kBottom = 440.0;

    int i_lo = 0;
    int i_hi = 0;
    double y_lo = 0.0;
    double y_hi = 0.0;
    bool any = false;
    for (const auto& s : series) {
        for (const auto& [i, angle] : s.points) {
            if (!(angle > 0.0) || !std::isfinite(angle)) {
                continue;
            }
            const double y = std::log10(angle);
            if (!any) {
                i_lo = i_hi = i;
                y_lo = y_hi = y;
                any = true;
            } else {
                i_lo = std::min(i_lo, i);
                i_hi = std::max(i_hi, i);
                y_lo = std::min(y_lo, y);
                y_hi = std::max(y_hi, y);
            }
        }
    }
    if (!any) {
        i_lo = 0;
        i_hi = 1;
        y_lo = -1.0;
        y_hi = 0.0;
    }
    if (i_lo == i_hi) {
        i_hi = i_lo + 1;
    }
    y_lo = std::floor(y_lo);
    y_hi = std::ceil(y_hi);
    if (y_lo == y_hi) {
        y_hi += 1.0;
    }

    const auto sx = [&](double i) {
        return kLeft + (i - i_lo) / double(i_hi - i_lo) * (kRight - kLeft);
    };
    const auto sy = [&](double y) {
        return kBottom - (y - y_lo) / (y_hi - y_lo) * (kBottom - kTop);
    };

    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<!-- lantern 1.0 -->\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
          "viewBox=\"0 0 "
       << svg_coord(kWidth) << ' ' << svg_coord(kHeight) << "\">\n"
       << "<rect x=\"0\" y=\"0\" width=\"" << svg_coord(kWidth)
       << "\" height=\"" << svg_coord(kHeight) << "\" fill=\"white\"/>\n";

    // axes
    os << "<line x1=\"" << svg_coord(kLeft) << "\" y1=\"" << svg_coord(kBottom)
       << "\" x2=\"" << svg_coord(kRight) << "\" y2=\"" << svg_coord(kBottom)
       << "\" stroke=\"black\"/>\n"
       << "<line x1=\"" << svg_coord(kLeft) << "\" y1=\"" << svg_coord(kTop)
       << "\" x2=\"" << svg_coord(kLeft) << "\" y2=\"" << svg_coord(kBottom)
       << "\" stroke=\"black\"/>\n";

    for (int i = i_lo; i <= i_hi; ++i) {
        const double x = sx(i);
        os << "<line x1=\"" << svg_coord(x) << "\" y1=\"" << svg_coord(kBottom)
           << "\" x2=\"" << svg_coord(x) << "\" y2=\""
           << svg_coord(kBottom + 5.0) << "\" stroke=\"black\"/>\n"
           << "<text x=\"" << svg_coord(x) << "\" y=\""
           << svg_coord(kBottom + 20.0)
           << "\" font-size=\"12\" text-anchor=\"middle\">" << i
           << "</text>\n";
    }
    for (double y = y_lo; y <= y_hi + 0.5; y += 1.0) {
        const double yy = sy(y);
        os << "<line x1=\"" << svg_coord(kLeft - 5.0) << "\" y1=\""
           << svg_coord(yy) << "\" x2=\"" << svg_coord(kLeft) << "\" y2=\""
           << svg_coord(yy) << "\" stroke=\"black\"/>\n"
           << "<text x=\"" << svg_coord(kLeft - 10.0) << "\" y=\""
           << svg_coord(yy + 4.0)
           << "\" font-size=\"12\" text-anchor=\"end\">1e"
           << static_cast<int>(y) << "</text>\n";
    }
    os << "<text x=\"" << svg_coord((kLeft + kRight) / 2.0) << "\" y=\""
       << svg_coord(kHeight - 10.0)
       << "\" font-size=\"13\" text-anchor=\"middle\">i (n = 2^i)</text>\n"
       << "<text x=\"18\" y=\"" << svg_coord((kTop + kBottom) / 2.0)
       << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 "
          "18 "
       << svg_coord((kTop + kBottom) / 2.0) << ")\">" << y_label
       << "</text>\n";

    std::size_t color = 0;
    double legend_y = kTop + 10.0;
    for (const auto& s : series) {
        const char* stroke = kPalette[color % std::size(kPalette)];
        ++color;
        std::string pts;
        for (const auto& [i, angle] : s.points) {
            if (!(angle > 0.0) || !std::isfinite(angle)) {
                continue;
            }
            if (!pts.empty()) {
                pts += ' ';
            }
            pts += svg_coord(sx(i));
            pts += ',';
            pts += svg_coord(sy(std::log10(angle)));
        }
        if (!pts.empty()) {
            os << "<polyline fill=\"none\" stroke=\"" << stroke
               << "\" stroke-width=\"1.5\" points=\"" << pts << "\"/>\n";
        }
        os << "<text x=\"" << svg_coord(kRight - 150.0) << "\" y=\""
           << svg_coord(legend_y) << "\" font-size=\"12\" fill=\"" << stroke
           << "\">" << s.label << "</text>\n";
        legend_y += 16.0;
    }
    os << "</svg>\n";
}

}  // namespace lantern::io
