#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lantern/analysis.hpp"
#include "lantern/io.hpp"
#include "lantern/mesh.hpp"

// Command-line surface for the Schwarz lantern toolkit.
//
// Exit codes (stable contract):
//   0  success / AGREE
//   1  usage or parameter error
//   2  negative scientific verdict (DISAGREE, missed target, broken nesting)
//   3  resource cap exceeded (mesh too large)
//   4  sequence not converged

namespace {

using lantern::analysis::ConvergenceReport;
using lantern::analysis::Schedule;
using lantern::analysis::ScheduleKind;
using lantern::ga3::Bivector3;
using lantern::mesh::LanternParams;

std::vector<std::int64_t> parse_m_values(const std::string& csv) {
    std::vector<std::int64_t> values;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        values.push_back(std::stoll(item));
    }
    if (values.empty()) {
        throw std::invalid_argument("--m-values must list at least one value");
    }
    return values;
}

// Built-in schedule names, or "custom" with per-step band counts aligned
// to i = i_min, i_min+1, ...
Schedule make_schedule(const std::string& name, int c_exp,
                       const std::string& m_values, int i_min) {
    if (name == "m=n") {
        return Schedule::m_eq_n();
    }
    if (name == "m=n^3") {
        return Schedule::m_eq_n_cubed();
    }
    if (name == "m=c*n^2") {
        return Schedule::m_eq_c_n_squared(c_exp);
    }
    if (name == "custom") {
        auto values = parse_m_values(m_values);
        return Schedule::custom([values, i_min](std::int64_t n) {
            int i = 0;
            while ((std::int64_t{1} << i) < n) {
                ++i;
            }
            const int k = i - i_min;
            if (k < 0 || k >= static_cast<int>(values.size())) {
                throw std::invalid_argument(
                    "--m-values does not cover the requested i range");
            }
            return values[static_cast<std::size_t>(k)];
        });
    }
    throw std::invalid_argument("unknown schedule '" + name +
                                "' (expected m=n, m=n^3, m=c*n^2 or custom)");
}

std::optional<Bivector3> make_target(const std::string& name,
                                     const Schedule& schedule, double a) {
    if (name == "none" || name.empty()) {
        return std::nullopt;
    }
    if (name == "ixk") {
        return lantern::analysis::kIxK;
    }
    if (name == "jxi") {
        return lantern::analysis::kJxI;
    }
    if (name == "mixture") {
        if (schedule.kind != ScheduleKind::m_eq_c_n_squared) {
            throw std::invalid_argument(
                "--target mixture requires --schedule m=c*n^2");
        }
        return lantern::analysis::mixture_limit(a, schedule.c_exp);
    }
    throw std::invalid_argument("unknown target '" + name +
                                "' (expected ixk, jxi, mixture or none)");
}

// Writes to --out, or stdout when the path is empty or "-".
class OutputSink {
   public:
    explicit OutputSink(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path, std::ios::binary);
            if (!file_) {
                throw std::invalid_argument("cannot open output path '" +
                                            path + "'");
            }
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

   private:
    std::ofstream file_;
};

struct CommonScheduleFlags {
    std::string schedule = "m=n";
    int c_exp = 0;
    CLI::Option* c_exp_opt = nullptr;
    std::string m_values;
    double a = 1.0;
    int i_min = 2;
    int i_max = 12;
    std::string format = "csv";
    std::string out;
    int digits = 17;
};

void require_c_exp(const std::string& schedule, const CLI::Option* opt,
                   const std::string& flag) {
    if (schedule == "m=c*n^2" && (opt == nullptr || opt->count() == 0)) {
        throw std::invalid_argument(flag + " is required for m=c*n^2");
    }
}

void add_schedule_flags(CLI::App* cmd, CommonScheduleFlags& f) {
    cmd->add_option("--schedule", f.schedule,
                    "Refinement schedule: m=n, m=n^3, m=c*n^2 or custom")
        ->required();
    f.c_exp_opt = cmd->add_option("--c-exp", f.c_exp,
                                  "c = 2^c-exp, required for m=c*n^2")
                      ->check(CLI::Range(-8, 8));
    cmd->add_option("--m-values", f.m_values,
                    "Comma-separated band counts for --schedule custom, one "
                    "per i starting at --i-min");
    cmd->add_option("--a", f.a, "Cylinder height")->check(CLI::PositiveNumber);
    cmd->add_option("--i-min", f.i_min, "First refinement exponent (n = 2^i)");
    cmd->add_option("--i-max", f.i_max, "Last refinement exponent");
    cmd->add_option("--out", f.out, "Output path (default stdout)");
    cmd->add_option("--digits", f.digits, "Significant digits for floats")
        ->check(CLI::Range(6, 17));
}

int g_exit = 0;

void run_mesh_command(std::int64_t n, std::int64_t m, double a, double radius,
                      const std::string& format, const std::string& out,
                      int digits) {
    const LanternParams params{radius, a, n, m};
    const auto mesh = lantern::mesh::generate_lantern(params);
    OutputSink sink(out);
    if (format == "obj") {
        lantern::io::write_mesh_obj(sink.stream(), mesh, digits);
    } else if (format == "json") {
        sink.stream() << lantern::io::mesh_to_json(params, mesh).dump(2)
                      << '\n';
    } else {
        throw std::invalid_argument("mesh format must be obj or json");
    }
}

void run_limit_command(const CommonScheduleFlags& f,
                       const std::string& target_name) {
    require_c_exp(f.schedule, f.c_exp_opt, "--c-exp");
    const Schedule schedule =
        make_schedule(f.schedule, f.c_exp, f.m_values, f.i_min);
    const auto target = make_target(target_name, schedule, f.a);
    const ConvergenceReport report = lantern::analysis::run_schedule(
        schedule, f.a, f.i_min, f.i_max, target);
    OutputSink sink(f.out);
    if (f.format == "csv") {
        lantern::io::write_limit_csv(sink.stream(), report, f.digits);
    } else if (f.format == "json") {
        sink.stream() << lantern::io::report_to_json(report).dump(2) << '\n';
    } else {
        throw std::invalid_argument("limit format must be csv or json");
    }
    const bool hit =
        report.cauchy_ok &&
        (!target ||
         report.target_angle < lantern::analysis::kTargetAngleGate);
    g_exit = hit ? 0 : 2;
}

void run_area_command(const CommonScheduleFlags& f, double radius,
                      bool projected) {
    require_c_exp(f.schedule, f.c_exp_opt, "--c-exp");
    const Schedule schedule =
        make_schedule(f.schedule, f.c_exp, f.m_values, f.i_min);
    const auto rows = lantern::analysis::area_sequence(schedule, f.a, radius,
                                                       f.i_min, f.i_max);
    std::vector<lantern::io::AreaTableRow> table;
    table.reserve(rows.size());
    for (const auto& row : rows) {
        lantern::io::AreaTableRow out_row{row.i, row.n, row.m, row.area, {}};
        if (projected &&
            row.m <= lantern::mesh::kTriangleCap / (2 * row.n)) {
            const LanternParams p{radius, f.a, row.n, row.m};
            const auto mesh = lantern::mesh::generate_lantern(p);
            out_row.projected_area =
                lantern::analysis::projected_area(mesh, radius);
        }
        table.push_back(out_row);
    }
    OutputSink sink(f.out);
    if (f.format == "csv") {
        lantern::io::write_area_csv(sink.stream(), table, f.digits);
    } else if (f.format == "json") {
        sink.stream() << lantern::io::area_to_json(schedule.label(), f.a,
                                                   radius, table)
                             .dump(2)
                      << '\n';
    } else {
        throw std::invalid_argument("area format must be csv or json");
    }
}

void run_probe_command(const std::string& schedule_a, int c_exp_a,
                       const std::string& schedule_b, int c_exp_b, double a,
                       int i_max, double tol_angle, const std::string& format,
                       const std::string& out) {
    const Schedule sa = make_schedule(schedule_a, c_exp_a, "", 2);
    const Schedule sb = make_schedule(schedule_b, c_exp_b, "", 2);
    const auto result =
        lantern::analysis::well_definedness_probe(sa, sb, a, i_max, tol_angle);
    const bool disagree = result.verdict == lantern::analysis::Verdict::disagree;
    OutputSink sink(out);
    if (format == "text") {
        sink.stream() << "verdict: " << (disagree ? "DISAGREE" : "AGREE")
                      << "\nseparation_angle_rad: "
                      << lantern::io::format_double(result.separation_angle)
                      << '\n';
    } else if (format == "csv") {
        sink.stream() << "verdict,separation_angle_rad\n"
                      << (disagree ? "DISAGREE" : "AGREE") << ','
                      << lantern::io::format_double(result.separation_angle)
                      << '\n';
    } else if (format == "json") {
        sink.stream() << lantern::io::probe_to_json(result, tol_angle).dump(2)
                      << '\n';
    } else {
        throw std::invalid_argument("probe format must be text, csv or json");
    }
    g_exit = disagree ? 2 : 0;
}

void run_plot_command(const std::vector<std::string>& schedules, int c_exp,
                      double a, int i_min, int i_max,
                      const std::string& target_name, const std::string& out) {
    if (out.empty()) {
        throw std::invalid_argument("plot requires --out");
    }
    std::vector<lantern::io::PlotSeries> series;
    for (const auto& name : schedules) {
        const Schedule schedule = make_schedule(name, c_exp, "", i_min);
        const auto target = make_target(target_name, schedule, a);
        const ConvergenceReport report =
            lantern::analysis::run_schedule(schedule, a, i_min, i_max, target);
        lantern::io::PlotSeries s;
        s.label = schedule.label();
        for (const auto& step : report.steps) {
            const double angle =
                target ? step.angle_to_target
                       : lantern::ga3::plane_angle(step.pseudoscalar_exact,
                                                   report.limit_estimate,
                                                   true);
            s.points.emplace_back(step.i, angle);
        }
        series.push_back(std::move(s));
    }
    const std::string y_label = target_name == "none" || target_name.empty()
                                    ? "plane angle to final iterate (rad)"
                                    : "plane angle to target (rad)";
    OutputSink sink(out);
    lantern::io::write_svg_plot(sink.stream(), series, y_label);
}

void run_check_nesting_command(const CommonScheduleFlags& f, double radius,
                               double tol) {
    require_c_exp(f.schedule, f.c_exp_opt, "--c-exp");
    const Schedule schedule =
        make_schedule(f.schedule, f.c_exp, f.m_values, f.i_min);
    if (f.i_min < 2 || f.i_min >= f.i_max || f.i_max > 40) {
        throw std::invalid_argument("i range invalid: need 2 <= i_min < i_max <= 40");
    }
    bool all_nested = true;
    std::ostringstream table;
    table << "i_coarse,n_coarse,m_coarse,i_fine,n_fine,m_fine,nested\n";
    for (int i = f.i_min; i < f.i_max; ++i) {
        const std::int64_t n_c = std::int64_t{1} << i;
        const std::int64_t n_f = std::int64_t{1} << (i + 1);
        const LanternParams coarse{radius, f.a, n_c, schedule.bands_for(n_c)};
        const LanternParams fine{radius, f.a, n_f, schedule.bands_for(n_f)};
        for (const auto& p : {coarse, fine}) {
            if (p.m > lantern::mesh::kTriangleCap / (2 * p.n)) {
                throw lantern::mesh::MeshCapExceeded(
                    "nesting check exceeds the triangle cap");
            }
        }
        const double use_tol =
            tol > 0.0 ? tol : lantern::mesh::default_nesting_tol(fine);
        const bool nested = lantern::mesh::check_nesting(coarse, fine, use_tol);
        all_nested = all_nested && nested;
        table << i << ',' << n_c << ',' << coarse.m << ',' << i + 1 << ','
              << n_f << ',' << fine.m << ',' << (nested ? "yes" : "no")
              << '\n';
    }
    OutputSink sink(f.out);
    sink.stream() << table.str();
    g_exit = all_nested ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Schwarz lantern meshes and refinement-limit analysis"};
    app.require_subcommand(1);

    // mesh
    auto* mesh_cmd =
        app.add_subcommand("mesh", "Write a lantern mesh as OBJ or JSON");
    std::int64_t mesh_n = 0;
    std::int64_t mesh_m = 0;
    double mesh_a = 1.0;
    double mesh_radius = 1.0;
    std::string mesh_format = "obj";
    std::string mesh_out;
    int mesh_digits = 17;
    mesh_cmd->add_option("--n", mesh_n, "Angular subdivisions per circle")
        ->required();
    mesh_cmd->add_option("--m", mesh_m, "Number of bands")->required();
    mesh_cmd->add_option("--a", mesh_a, "Cylinder height");
    mesh_cmd->add_option("--radius", mesh_radius, "Cylinder radius");
    mesh_cmd->add_option("--format", mesh_format, "obj or json");
    mesh_cmd->add_option("--out", mesh_out, "Output path (default stdout)");
    mesh_cmd->add_option("--digits", mesh_digits, "Significant digits")
        ->check(CLI::Range(6, 17));
    mesh_cmd->callback([&] {
        run_mesh_command(mesh_n, mesh_m, mesh_a, mesh_radius, mesh_format,
                         mesh_out, mesh_digits);
    });

    // limit
    auto* limit_cmd = app.add_subcommand(
        "limit", "Pseudoscalar convergence table along one schedule");
    CommonScheduleFlags limit_flags;
    std::string limit_target = "none";
    add_schedule_flags(limit_cmd, limit_flags);
    limit_cmd->add_option("--format", limit_flags.format, "csv or json");
    limit_cmd->add_option("--target", limit_target,
                          "Limit blade to compare against: ixk, jxi, mixture "
                          "or none");
    limit_cmd->callback([&] { run_limit_command(limit_flags, limit_target); });

    // area
    auto* area_cmd = app.add_subcommand(
        "area", "Lantern area sequence along one schedule");
    CommonScheduleFlags area_flags;
    double area_radius = 1.0;
    bool area_projected = false;
    add_schedule_flags(area_cmd, area_flags);
    area_cmd->add_option("--format", area_flags.format, "csv or json");
    area_cmd->add_option("--radius", area_radius, "Cylinder radius")
        ->check(CLI::PositiveNumber);
    area_cmd->add_flag("--projected", area_projected,
                       "Also sum tangent-plane projected triangle areas "
                       "(meshes under the cap only)");
    area_cmd->callback(
        [&] { run_area_command(area_flags, area_radius, area_projected); });

    // probe
    auto* probe_cmd = app.add_subcommand(
        "probe", "Compare the limits reached under two schedules");
    std::string probe_sched_a;
    std::string probe_sched_b;
    int probe_c_exp_a = 0;
    int probe_c_exp_b = 0;
    double probe_a = 1.0;
    // 2^20 is the deepest level at which m = n^3 stays under the 2^62
    // band bound; by then the m=n transient (~pi^2/2n) has shrunk to the
    // microradian scale the separation checks expect.
    int probe_i_max = 20;
    double probe_tol = 0.1;
    std::string probe_format = "text";
    std::string probe_out;
    probe_cmd->add_option("--schedule-a", probe_sched_a, "First schedule")
        ->required();
    probe_cmd->add_option("--schedule-b", probe_sched_b, "Second schedule")
        ->required();
    auto* probe_c_a_opt =
        probe_cmd->add_option("--c-exp-a", probe_c_exp_a,
                              "c exponent, required for m=c*n^2 on a")
            ->check(CLI::Range(-8, 8));
    auto* probe_c_b_opt =
        probe_cmd->add_option("--c-exp-b", probe_c_exp_b,
                              "c exponent, required for m=c*n^2 on b")
            ->check(CLI::Range(-8, 8));
    probe_cmd->add_option("--a", probe_a, "Cylinder height")
        ->check(CLI::PositiveNumber);
    probe_cmd->add_option("--i-max", probe_i_max, "Last refinement exponent");
    probe_cmd->add_option("--tol-angle", probe_tol,
                          "Separation angle above which the verdict is "
                          "DISAGREE (rad)");
    probe_cmd->add_option("--format", probe_format, "text, csv or json");
    probe_cmd->add_option("--out", probe_out, "Output path (default stdout)");
    probe_cmd->callback([&] {
        require_c_exp(probe_sched_a, probe_c_a_opt, "--c-exp-a");
        require_c_exp(probe_sched_b, probe_c_b_opt, "--c-exp-b");
        run_probe_command(probe_sched_a, probe_c_exp_a, probe_sched_b,
                          probe_c_exp_b, probe_a, probe_i_max, probe_tol,
                          probe_format, probe_out);
    });

    // plot
    auto* plot_cmd = app.add_subcommand(
        "plot", "SVG convergence plot for one or more schedules");
    std::vector<std::string> plot_schedules;
    int plot_c_exp = 0;
    double plot_a = 1.0;
    int plot_i_min = 2;
    int plot_i_max = 12;
    std::string plot_target = "none";
    std::string plot_out;
    plot_cmd->add_option("--schedule", plot_schedules,
                         "Schedule (repeatable): m=n, m=n^3, m=c*n^2")
        ->required();
    auto* plot_c_opt =
        plot_cmd->add_option("--c-exp", plot_c_exp,
                             "c = 2^c-exp, required for m=c*n^2")
            ->check(CLI::Range(-8, 8));
    plot_cmd->add_option("--a", plot_a, "Cylinder height")
        ->check(CLI::PositiveNumber);
    plot_cmd->add_option("--i-min", plot_i_min, "First refinement exponent");
    plot_cmd->add_option("--i-max", plot_i_max, "Last refinement exponent");
    plot_cmd->add_option("--target", plot_target,
                         "ixk, jxi, mixture or none");
    plot_cmd->add_option("--out", plot_out, "Output SVG path")->required();
    plot_cmd->callback([&] {
        for (const auto& name : plot_schedules) {
            require_c_exp(name, plot_c_opt, "--c-exp");
        }
        run_plot_command(plot_schedules, plot_c_exp, plot_a, plot_i_min,
                         plot_i_max, plot_target, plot_out);
    });

    // check-nesting
    auto* nest_cmd = app.add_subcommand(
        "check-nesting",
        "Verify vertex nesting between consecutive refinements");
    CommonScheduleFlags nest_flags;
    nest_flags.i_max = 6;
    double nest_radius = 1.0;
    double nest_tol = 0.0;  // 0 = default 1e-9 * max(R, a)
    add_schedule_flags(nest_cmd, nest_flags);
    nest_cmd->add_option("--radius", nest_radius, "Cylinder radius")
        ->check(CLI::PositiveNumber);
    nest_cmd->add_option("--tol", nest_tol,
                         "Containment tolerance (default 1e-9 max(R, a))");
    nest_cmd->callback([&] {
        run_check_nesting_command(nest_flags, nest_radius, nest_tol);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const lantern::mesh::MeshCapExceeded& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const lantern::analysis::NotConverged& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return g_exit;
}
