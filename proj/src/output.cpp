#include "ihsim/output.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ihsim/error.hpp"
#include "json.hpp"

namespace ihsim {

namespace {

std::string num(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  return os;
}

void check_written(std::ostream& os, const std::filesystem::path& path) {
  os.flush();
  if (!os) fail(ErrorKind::Io, "write failed for " + path.string());
}

void scalars(std::ostream& os, const NamedField& f) {
  os << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
  for (double v : f.values) os << num(v, 9) << "\n";
}

}  // namespace

void write_vtk(std::ostream& os, const Mesh& mesh, std::span<const NamedField> point_fields,
               std::span<const NamedField> cell_fields) {
  for (const NamedField& f : point_fields) {
    if (f.values.size() != mesh.num_vertices()) fail(ErrorKind::InvalidArgument, "point field " + f.name + " has wrong length");
    if (f.name.empty() || f.name.find_first_of(" \t\n") != std::string::npos) {
      fail(ErrorKind::InvalidArgument, "field names must be nonempty without whitespace");
    }
  }
  for (const NamedField& f : cell_fields) {
    if (f.values.size() != mesh.num_triangles()) fail(ErrorKind::InvalidArgument, "cell field " + f.name + " has wrong length");
    if (f.name.empty() || f.name.find_first_of(" \t\n") != std::string::npos) {
      fail(ErrorKind::InvalidArgument, "field names must be nonempty without whitespace");
    }
  }
  os << "# vtk DataFile Version 3.0\nihsim\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.num_vertices() << " double\n";
  for (const Point& p : mesh.vertices) os << num(p.x, 9) << " " << num(p.y, 9) << " 0\n";
  os << "CELLS " << mesh.num_triangles() << " " << 4 * mesh.num_triangles() << "\n";
  for (const Triangle& t : mesh.triangles) os << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  os << "CELL_TYPES " << mesh.num_triangles() << "\n";
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) os << "5\n";
  if (!point_fields.empty()) {
    os << "POINT_DATA " << mesh.num_vertices() << "\n";
    for (const NamedField& f : point_fields) scalars(os, f);
  }
  if (!cell_fields.empty()) {
    os << "CELL_DATA " << mesh.num_triangles() << "\n";
    for (const NamedField& f : cell_fields) scalars(os, f);
  }
}

void write_vtk(const std::filesystem::path& path, const Mesh& mesh, std::span<const NamedField> point_fields,
               std::span<const NamedField> cell_fields) {
  std::ofstream os = open_out(path);
  write_vtk(os, mesh, point_fields, cell_fields);
  check_written(os, path);
}

void write_timeseries_csv(std::ostream& os, const TimeSeries& ts) {
  for (std::size_t i = 0; i < ts.columns.size(); ++i) os << (i ? "," : "") << ts.columns[i];
  os << "\n";
  for (const auto& row : ts.rows) {
    if (row.size() != ts.columns.size()) fail(ErrorKind::InvalidArgument, "time series row length mismatch");
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << num(row[i], 12);
    os << "\n";
  }
}

void write_timeseries_csv(const std::filesystem::path& path, const TimeSeries& ts) {
  std::ofstream os = open_out(path);
  write_timeseries_csv(os, ts);
  check_written(os, path);
}

TimeSeries read_timeseries_csv(std::istream& is) {
  TimeSeries ts;
  std::string line;
  if (!std::getline(is, line)) fail(ErrorKind::Parse, "empty time series");
  std::stringstream header(line);
  std::string cell;
  while (std::getline(header, cell, ',')) ts.columns.push_back(cell);
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        fail(ErrorKind::Parse, "line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    if (row.size() != ts.columns.size()) fail(ErrorKind::Parse, "line " + std::to_string(lineno) + ": wrong column count");
    ts.rows.push_back(std::move(row));
  }
  return ts;
}

void write_snapshots(const std::filesystem::path& dir, const Simulation& sim) {
  char tag[32];
  std::snprintf(tag, sizeof tag, "%04d", sim.state().step);
  const SimulationState& s = sim.state();
  const std::vector<NamedField> wp_points{{"theta", s.theta}, {"z", s.z}};
  const std::vector<NamedField> wp_cells{{"joule", s.joule}};
  write_vtk(dir / (std::string("workpiece_") + tag + ".vtk"), sim.workpiece().mesh, wp_points, wp_cells);
  std::vector<double> region(sim.mesh().num_triangles());
  for (std::size_t t = 0; t < region.size(); ++t) region[t] = static_cast<double>(sim.mesh().regions[t]);
  const std::vector<NamedField> d_points{{"A", s.a}};
  const std::vector<NamedField> d_cells{{"region", region}};
  write_vtk(dir / (std::string("domain_") + tag + ".vtk"), sim.mesh(), d_points, d_cells);
}

std::string audit_json(const Simulation& sim) {
  const RunAudit& a = sim.audit();
  nlohmann::ordered_json j;
  j["t"] = sim.state().t;
  j["coarse_steps"] = sim.state().step;
  j["vertices"] = sim.mesh().num_vertices();
  j["workpiece_vertices"] = sim.workpiece().mesh.num_vertices();
  j["amp_mf"] = sim.waveform().amp_mf;
  j["amp_hf"] = sim.waveform().amp_hf;
  j["fine_dt"] = sim.fine_dt();
  j["window"] = sim.window();
  j["min_theta"] = a.min_theta;
  j["min_z"] = a.min_z;
  j["max_z"] = a.max_z;
  j["min_z_increment"] = a.min_z_increment;
  j["min_d_joule"] = a.min_joule;
  j["min_d_fourier"] = a.min_fourier;
  j["min_d_phase"] = a.min_phase;
  j["skipped_nodes"] = a.skipped_nodes;
  j["periodic_failures"] = a.periodic_failures;
  j["hardened_set_monotone"] = a.hardened_set_monotone;
  const double tol = -1e-12;
  j["bounds_pass"] = a.min_theta >= tol && a.min_z >= tol && a.max_z < 1.0 && a.min_z_increment >= tol;
  j["dissipation_pass"] = a.min_joule >= tol && a.min_fourier >= tol && a.min_phase >= tol;
  return j.dump(2);
}

void run_to_directory(Simulation& sim, const std::filesystem::path& dir, bool quiet) {
  std::filesystem::create_directories(dir);
  const int every = sim.config().output.snapshot_every;
  auto on_step = [&](const Simulation& s) {
    if (every > 0 && (s.state().step % every == 0 || s.finished())) write_snapshots(dir, s);
    if (!quiet) {
      const auto& row = s.series().rows.back();
      std::fprintf(stderr, "step %d/%d t=%.6g theta_max=%.6g z_max=%.6g\n", s.state().step, s.steps_total(), row[0],
                   s.state().theta.empty() ? 0.0 : row[row.size() - 2], row.back());
    }
  };
  try {
    run_simulation(sim, on_step);
  } catch (const std::exception& e) {
    write_timeseries_csv(dir / "timeseries.csv", sim.series());
    nlohmann::ordered_json err;
    err["error"] = e.what();
    err["step"] = sim.state().step;
    err["t"] = sim.state().t;
    std::ofstream os = open_out(dir / "error.json");
    os << err.dump(2) << "\n";
    throw;
  }
  write_timeseries_csv(dir / "timeseries.csv", sim.series());
  std::ofstream os = open_out(dir / "summary.json");
  os << audit_json(sim) << "\n";
  check_written(os, dir / "summary.json");
}

}  // namespace ihsim
