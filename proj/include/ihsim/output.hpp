#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ihsim/driver.hpp"
#include "ihsim/geometry.hpp"

namespace ihsim {

struct NamedField {
  std::string name;
  std::vector<double> values;
};

/// Legacy ASCII VTK unstructured grid in the z = 0 plane, 9 significant digits.
void write_vtk(std::ostream& os, const Mesh& mesh, std::span<const NamedField> point_fields,
               std::span<const NamedField> cell_fields = {});
void write_vtk(const std::filesystem::path& path, const Mesh& mesh, std::span<const NamedField> point_fields,
               std::span<const NamedField> cell_fields = {});

/// Comma-separated, header row, 12 significant digits.
void write_timeseries_csv(std::ostream& os, const TimeSeries& ts);
void write_timeseries_csv(const std::filesystem::path& path, const TimeSeries& ts);
TimeSeries read_timeseries_csv(std::istream& is);

/// Workpiece snapshot (theta, z, averaged Joule heat) and full-domain
/// snapshot (A, region) of the current state.
void write_snapshots(const std::filesystem::path& dir, const Simulation& sim);

/// JSON summary of the audit and final diagnostics.
std::string audit_json(const Simulation& sim);

/// Runs the simulation writing timeseries.csv, scheduled snapshots and
/// summary.json into `dir`. On failure the partial series and an error
/// record are flushed before the exception propagates.
void run_to_directory(Simulation& sim, const std::filesystem::path& dir, bool quiet = true);

}  // namespace ihsim
