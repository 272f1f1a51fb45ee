#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hlx/field.hpp"
#include "hlx/hamiltonian.hpp"

namespace hlx {

enum class Task { validate, legendre, flow, criteria, patch, solve, compare, aronsson, acceptance };

std::optional<Task> parse_task(const std::string& name);
const char* to_string(Task t);

struct HamiltonianSpec {
  std::string kind = "power";  // power | quadratic | polygon | table
  int dim = 2;
  double exponent = 2.0;
  std::vector<double> matrix;  // row-major A for H = |Ap|^2/2
  std::vector<double> ball;    // polygon vertices, flattened
  std::string table;           // CSV path, resolved
  double box_half = 4.0;
};

struct GridSpec {
  std::vector<int> n{33, 33};
  std::vector<double> lo{0.0, 0.0}, hi{1.0, 1.0};
};

struct DataSpec {
  // affine | cone | aronsson-exemplar | random-seeded | file
  std::string family = "affine";
  std::vector<double> slope{0.3, -0.2};
  double offset = 0.0;
  double k = 0.5;
  std::vector<double> vertex{0.3, 1.9};
  double amplitude = 0.3;
  int modes = 4;
  std::string path;  // file family, resolved
};

struct ExperimentConfig {
  Task task = Task::validate;
  HamiltonianSpec hamiltonian;
  GridSpec grid;
  DataSpec data;
  std::string out_dir = "hlx_out";
  std::uint64_t seed = 1;
  // Everything else, keyed "section.key": tolerances and per-task knobs.
  std::map<std::string, std::string> params;
  std::string config_path;

  double number(const std::string& key, double fallback) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const;
};

// INI text with [run], [hamiltonian], [grid], [data], [tolerances] and per-task sections.
// Relative paths resolve against base_dir. Throws Error(input) on malformed values.
ExperimentConfig parse_config(std::istream& is, Task task, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path, Task task);

HamiltonianModel make_hamiltonian(const HamiltonianSpec& spec);
Grid make_grid(const GridSpec& spec);
// Data sampled on the grid, edge nodes marked as boundary.
ScalarField make_data(const DataSpec& spec, const Grid& g, const HamiltonianModel& H, std::uint64_t seed);
// Closed form of the data family when it is an exact absolute minimiser, else nullopt.
std::optional<ScalarField> exact_solution(const DataSpec& spec, const Grid& g, const HamiltonianModel& H);

struct CheckVerdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RunResult {
  int exit_code = 0;  // 0 all checks pass, 1 failed check or module error, 2 usage
  std::vector<CheckVerdict> checks;
  std::vector<std::string> artifacts;  // relative to out_dir
  std::string error;
  std::string manifest_path;
};

RunResult run_experiment(const ExperimentConfig& cfg);

std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);

// Two-column text table with a comment header.
void write_xy(const std::string& path, const std::string& header, const std::vector<double>& x,
              const std::vector<double>& y);

}  // namespace hlx
