#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "slitcap/pipeline.hpp"
#include "slitcap/selftest.hpp"

using namespace slitcap;
using nlohmann::json;

namespace {

constexpr int kExitGeometry = 2;
constexpr int kExitSolver = 3;
constexpr int kExitTolerance = 4;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

json jnum(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

// "re,im" or "re"
Complex parse_complex(const std::string& s) {
  auto parse = [&](const std::string& t) {
    size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size() || !std::isfinite(v)) throw std::invalid_argument(t);
    return v;
  };
  try {
    const size_t c = s.find(',');
    if (c == std::string::npos) return {parse(s), 0.0};
    return {parse(s.substr(0, c)), parse(s.substr(c + 1))};
  } catch (const std::exception&) {
    throw CLI::ValidationError("expected a complex number as re,im, got '" + s + "'");
  }
}

std::vector<double> parse_list(const std::string& s, size_t n) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t used = 0;
    try {
      v.push_back(std::stod(item, &used));
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw CLI::ValidationError("bad number '" + item + "' in '" + s + "'");
  }
  if (v.size() != n) throw CLI::ValidationError("expected " + std::to_string(n) + " comma-separated numbers");
  return v;
}

struct Output {
  std::string format = "text";
  std::string path;

  void write(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << text;
  }
};

void add_output(CLI::App* cmd, Output& out) {
  cmd->add_option("--format", out.format, "Output format")->check(CLI::IsMember({"csv", "json", "text"}));
  cmd->add_option("--out", out.path, "Write the report to this file instead of stdout");
}

void add_tolerances(CLI::App* cmd, SolveOptions& opt) {
  cmd->add_option("--rel-tol", opt.rel_tol, "Relative tolerance of the evolution")->check(CLI::Range(1e-13, 1e-6));
  cmd->add_option("--abs-tol", opt.abs_tol, "Absolute tolerance of the evolution")->check(CLI::Range(1e-13, 1e-6));
}

int exit_code_for(const Error& e) {
  if (const auto* s = dynamic_cast<const StageError*>(&e)) return s->stage() == Stage::Geometry ? kExitGeometry : kExitSolver;
  return kExitSolver;
}

std::string render_compute(const Report& r, const std::string& format) {
  std::ostringstream os;
  const auto& s = r.state;
  double worst = 0.0;
  for (double e : r.endpoint_errors) worst = std::max(worst, e);
  if (format == "json") {
    json j;
    j["module"] = r.module;
    j["capacity"] = r.capacity;
    j["case"] = std::string(to_string(r.case_tag));
    j["beta"] = r.beta;
    j["accessory"] = {{"x1", s.x[0]}, {"x2", s.x[1]}, {"x3", s.x[2]}, {"x4", s.x[3]},
                      {"y0", s.y0},   {"m", s.m},     {"a_re", s.a.real()}, {"a_im", s.a.imag()}};
    j["defects"] = {{"sum", r.defect_sum}, {"residue", r.defect_residue}, {"warnings", r.defect_warnings}};
    j["endpoint_errors"] = r.traced ? json(r.endpoint_errors) : json(nullptr);
    j["line_deviation"] = r.traced ? json(r.line_deviation) : json(nullptr);
    j["steps"] = {{"accepted", r.accepted_steps}, {"rejected", r.rejected_steps}};
    j["runtime_ms"] = r.runtime_ms;
    os << j.dump(2) << "\n";
  } else if (format == "csv") {
    os << "m,cap,defect_sum,defect_residue,line_deviation,max_endpoint_error\n";
    os << num(r.module) << "," << num(r.capacity) << "," << num(r.defect_sum) << "," << num(r.defect_residue) << ","
       << (r.traced ? num(r.line_deviation) : "nan") << "," << (r.traced ? num(worst) : "nan") << "\n";
  } else {
    os << "case            " << to_string(r.case_tag) << "\n";
    os << "module m        " << num(r.module) << "\n";
    os << "capacity 1/m    " << num(r.capacity) << "\n";
    os << "x1..x4          " << num(s.x[0]) << " " << num(s.x[1]) << " " << num(s.x[2]) << " " << num(s.x[3]) << "\n";
    os << "y0              " << num(s.y0) << "\n";
    os << "a               " << num(s.a.real()) << " " << num(s.a.imag()) << "i\n";
    os << "defects         sum " << num(r.defect_sum) << ", residue " << num(r.defect_residue) << "\n";
    if (r.traced) {
      os << "endpoint errors " << num(r.endpoint_errors[0]) << " " << num(r.endpoint_errors[1]) << " "
         << num(r.endpoint_errors[2]) << " " << num(r.endpoint_errors[3]) << " (relative to the diameter)\n";
      os << "line deviation  " << num(r.line_deviation) << " (relative to the diameter)\n";
    }
    os << "steps           " << r.accepted_steps << " accepted, " << r.rejected_steps << " rejected\n";
    os << "runtime         " << num(r.runtime_ms) << " ms\n";
  }
  return os.str();
}

std::string render_sweep(const SweepResult& r, const std::string& format) {
  std::ostringstream os;
  if (format == "json") {
    json pts = json::array();
    for (const SweepPoint& p : r.points) {
      json q = {{"a", p.a}, {"ok", p.ok}};
      if (p.ok) {
        q["module"] = p.module;
        q["capacity"] = p.capacity;
        q["defect_sum"] = p.defect_sum;
        q["defect_residue"] = p.defect_residue;
        q["indicator"] = jnum(p.indicator);
        q["slope"] = jnum(p.slope);
      } else {
        q["error"] = p.error;
      }
      pts.push_back(q);
    }
    json mins = json::array(), maxs = json::array();
    for (size_t i : r.minima) mins.push_back(r.points[i].a);
    for (size_t i : r.maxima) maxs.push_back(r.points[i].a);
    json j = {{"points", pts},
              {"minima", mins},
              {"maxima", maxs},
              {"sign_checked", r.sign_checked},
              {"sign_mismatches", r.sign_mismatches}};
    os << j.dump(2) << "\n";
  } else if (format == "csv") {
    os << "a,m,cap,defect_sum,defect_residue\n";
    for (const SweepPoint& p : r.points) {
      if (p.ok)
        os << num(p.a) << "," << num(p.module) << "," << num(p.capacity) << "," << num(p.defect_sum) << ","
           << num(p.defect_residue) << "\n";
      else
        os << num(p.a) << ",nan,nan,nan,nan\n";
    }
  } else {
    os << "         a            m          cap    Re(g1+g2)     dm/da fd\n";
    for (const SweepPoint& p : r.points) {
      char buf[160];
      if (p.ok)
        std::snprintf(buf, sizeof buf, "%10.6g %12.9g %12.9g %12.5g %12.5g\n", p.a, p.module, p.capacity,
                      p.indicator, p.slope);
      else
        std::snprintf(buf, sizeof buf, "%10.6g  failed: %s\n", p.a, p.error.c_str());
      os << buf;
    }
    for (size_t i : r.minima) os << "minimum of m near a = " << num(r.points[i].a) << "\n";
    for (size_t i : r.maxima) os << "maximum of m near a = " << num(r.points[i].a) << "\n";
    os << "indicator sign agrees with the slope at " << (r.sign_checked - r.sign_mismatches) << " of "
       << r.sign_checked << " interior points\n";
  }
  return os.str();
}

std::string render_tables(const TablesResult& t, const std::string& format) {
  std::ostringstream os;
  const std::pair<const char*, const std::vector<TableRow>*> parts[] = {
      {"table1_module", &t.table1_module}, {"table1_capacity", &t.table1_capacity}, {"table2_capacity", &t.table2}};
  if (format == "json") {
    json j;
    for (const auto& [name, rows] : parts) {
      json a = json::array();
      for (const TableRow& r : *rows) {
        json q = {{"label", r.label}, {"reference", r.reference}, {"tolerance", r.tolerance}, {"ok", r.ok}};
        if (r.error.empty()) {
          q["computed"] = r.computed;
          q["delta"] = r.delta;
        } else {
          q["error"] = r.error;
        }
        a.push_back(q);
      }
      j[name] = a;
    }
    j["pass"] = t.pass;
    j["runtime_ms"] = t.runtime_ms;
    os << j.dump(2) << "\n";
  } else if (format == "csv") {
    os << "table,label,reference,computed,delta,ok\n";
    for (const auto& [name, rows] : parts)
      for (const TableRow& r : *rows)
        os << name << "," << r.label << "," << num(r.reference) << ","
           << (r.error.empty() ? num(r.computed) : "nan") << "," << (r.error.empty() ? num(r.delta) : "nan") << ","
           << (r.ok ? 1 : 0) << "\n";
  } else {
    for (const auto& [name, rows] : parts) {
      os << name << "\n";
      for (const TableRow& r : *rows) {
        char buf[200];
        if (r.error.empty())
          std::snprintf(buf, sizeof buf, "  %-8s ref %.8f  got %.8f  delta %.2e  %s\n", r.label.c_str(), r.reference,
                        r.computed, r.delta, r.ok ? "ok" : "FAIL");
        else
          std::snprintf(buf, sizeof buf, "  %-8s ref %.8f  failed: %s\n", r.label.c_str(), r.reference, r.error.c_str());
        os << buf;
      }
    }
    os << (t.pass ? "all rows within tolerance" : "some rows out of tolerance") << " (" << num(t.runtime_ms / 1000.0)
       << " s)\n";
  }
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conformal module and capacity of the exterior of two slits"};
  app.set_config("--config", "", "Read options from an INI/TOML file");
  app.require_subcommand(1);

  SolveOptions opt;
  Output out;

  std::string a1 = "0,1", a2 = "0,3", a3 = "0,0", a4 = "2,0";
  int samples = 256;
  bool no_trace = false;
  auto* compute_cmd = app.add_subcommand("compute", "Solve one configuration");
  compute_cmd->add_option("--a1", a1, "Endpoint A1 as re,im")->required();
  compute_cmd->add_option("--a2", a2, "Endpoint A2 as re,im")->required();
  compute_cmd->add_option("--a3", a3, "Endpoint A3 as re,im")->required();
  compute_cmd->add_option("--a4", a4, "Endpoint A4 as re,im")->required();
  compute_cmd->add_option("--samples", samples, "Boundary samples per slit side")->check(CLI::Range(64, 1 << 16));
  compute_cmd->add_flag("--no-trace", no_trace, "Skip map reconstruction");
  add_tolerances(compute_cmd, opt);
  add_output(compute_cmd, out);

  std::string line = "0,0,1,0", s3 = "0,-1", s4 = "0,-2";
  SweepSpec spec;
  auto* sweep_cmd = app.add_subcommand("sweep", "Slide one slit along a line past a fixed one");
  sweep_cmd->add_option("--a3", s3, "Fixed slit endpoint A3 as re,im")->required();
  sweep_cmd->add_option("--a4", s4, "Fixed slit endpoint A4 as re,im")->required();
  sweep_cmd->add_option("--line", line, "Sliding line as x0,y0,dx,dy: A1A2 = (x0,y0) + [a - L/2, a + L/2](dx,dy)/|(dx,dy)|")
      ->required();
  sweep_cmd->add_option("--length", spec.length, "Length L of the sliding slit")->required()->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--from", spec.from, "First a")->required();
  sweep_cmd->add_option("--to", spec.to, "Last a")->required();
  sweep_cmd->add_option("--steps", spec.steps, "Number of grid points")->required()->check(CLI::Range(2, 100000));
  sweep_cmd->add_option("--workers", spec.workers, "Concurrent points (0: all cores)")->check(CLI::NonNegativeNumber);
  add_tolerances(sweep_cmd, opt);
  add_output(sweep_cmd, out);

  auto* tables_cmd = app.add_subcommand("tables", "Reproduce the reference tables");
  add_tolerances(tables_cmd, opt);
  add_output(tables_cmd, out);

  auto* selftest_cmd = app.add_subcommand("selftest", "Elliptic property suite and the Table 2 golden suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*compute_cmd) {
      SlitConfig cfg{parse_complex(a1), parse_complex(a2), parse_complex(a3), parse_complex(a4)};
      opt.trace = !no_trace;
      opt.trace_samples = samples;
      out.write(render_compute(compute(cfg, opt), out.format));
      return 0;
    }
    if (*sweep_cmd) {
      const std::vector<double> l = parse_list(line, 4);
      spec.origin = Complex(l[0], l[1]);
      spec.direction = Complex(l[2], l[3]);
      if (std::abs(spec.direction) == 0.0) throw CLI::ValidationError("--line direction must be nonzero");
      spec.a3 = parse_complex(s3);
      spec.a4 = parse_complex(s4);
      const SweepResult r = sweep(spec, opt);
      out.write(render_sweep(r, out.format));
      int failed = 0, geometry = 0;
      for (const SweepPoint& p : r.points) {
        if (p.ok) continue;
        ++failed;
        geometry += p.exit_class == kExitGeometry;
        std::cerr << "a = " << num(p.a) << ": " << p.error << "\n";
      }
      if (failed == int(r.points.size())) return geometry == failed ? kExitGeometry : kExitSolver;
      return 0;
    }
    if (*tables_cmd) {
      const TablesResult t = reproduce_tables(opt);
      out.write(render_tables(t, out.format));
      return t.pass ? 0 : kExitTolerance;
    }
    if (*selftest_cmd) {
      bool pass = true;
      auto report = [&](const CheckResult& c) {
        std::printf("%s  %-78s worst %.3e (limit %.0e)\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.worst, c.limit);
        pass = pass && c.pass;
      };
      for (const CheckResult& c : elliptic_property_suite()) report(c);
      report(period_derivative_check());
      const TablesResult t = reproduce_tables();
      double worst = 0.0;
      bool rows_ok = true;
      for (const TableRow& r : t.table2) {
        worst = std::max(worst, r.error.empty() ? r.delta : INFINITY);
        rows_ok = rows_ok && r.ok;
      }
      report({"Table 2 golden capacities, 15 rows", worst, 5e-5, rows_ok});
      std::printf("%s\n", pass ? "selftest passed" : "selftest FAILED");
      return pass ? 0 : kExitTolerance;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
