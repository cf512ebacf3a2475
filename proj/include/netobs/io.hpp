#ifndef NETOBS_IO_HPP
#define NETOBS_IO_HPP

#include "netobs/observer.hpp"
#include "netobs/solver.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace netobs::io {

/// 17-significant-digit decimal, enough to round-trip any double.
std::string format_double(double v);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

/// time,plus,minus
void write_trace_csv(const std::filesystem::path& path, const TraceSeries& trace);
TraceSeries read_trace_csv(const std::filesystem::path& path);

/// time,l2
void write_l2_csv(const std::filesystem::path& path, const std::vector<double>& times,
                  const std::vector<double>& l2);
std::pair<std::vector<double>, std::vector<double>> read_l2_csv(const std::filesystem::path& path);

/// edge,x,plus,minus
void write_state_csv(const std::filesystem::path& path, const SystemState& state,
                     const GridMap& grids);

/// Initial-data file: {"edges":[{"id":0,"kind":"constant","plus":1.0,"minus":-1.0},
/// {"id":1,"kind":"samples","points":[[x,plus,minus],...]},
/// {"id":2,"kind":"exp-ramp","beta":6.0,"length":1.0}]}
std::string serialize_initial_data(const InitialData& ic);
InitialData parse_initial_data(const std::string& text);

/// Boundary-data file: {"nodes":[{"id":0,"kind":"zero"|"constant"|"sine"|"table",...}]}
std::string serialize_boundary_data(const BoundaryData& bc);
BoundaryData parse_boundary_data(const std::string& text);

struct RunManifest {
    std::string version;
    std::string command;     // the subcommand that produced the run
    std::string config_json; // resolved configuration, sufficient to re-run
    unsigned seed = 0;
    double wall_time_s = 0.0;
    std::vector<std::string> files; // outputs, relative to the run directory
};

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);
RunManifest read_manifest(const std::filesystem::path& path);

/// Writes l2.csv, final_state.csv and one trace CSV per probe into `dir`;
/// returns the file names it created.
std::vector<std::string> export_result(const std::filesystem::path& dir,
                                       const SimulationResult& result,
                                       const std::string& prefix = "");

} // namespace netobs::io

#endif
