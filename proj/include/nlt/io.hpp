#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nlt/experiments.hpp"

namespace nlt {

enum class Command { simulate, continuity, convergence, norms, validate_kernels, validate_sio, lemmas };
Command parse_command(const std::string& s);
std::string to_string(Command c);
std::vector<std::string> command_names();

// ---------------------------------------------------------------------------
// Configuration
//
// Flat INI text: `key = value` lines grouped in [section]s, one level deep.
// Keys may also be given without a section when the key name is unique across
// sections (e.g. `dt = 1e-3` for solver.dt). Numbers accept `a/b` fractions,
// lists are comma separated, component indices are 1-based.

struct ConfigKey {
    std::string name;  // section.key
    std::string type;  // real, int, string, bool, list
    std::string help;
};
const std::vector<ConfigKey>& config_keys();

struct SimulateSetup {
    std::string kernel = "biot-savart-2d";
    double kernel_sign = 1.0;
    int dim = 2;
    double gamma = 0.5;
    double h = 1.0 / 32;
    DensitySpec density;
    SolverConfig solver;
    Interpolation interpolation = Interpolation::idw;
    bool round_trip = false;
    ReplayInterpolation replay = ReplayInterpolation::cubic;
    double eval_spacing = 1.0 / 24;
    double eval_half_extent = 0.8;
};

struct NormsSetup {
    std::string input;  // CSV with x_1..x_n,value
    int dim = 2;
    double gamma = 0.5;
    double lattice_spacing = 0.0;  // > 0: samples lie on a lattice of this spacing
    std::vector<double> h_levels;  // empty: dyadic from 8 spacings down to 1
};

struct KernelsSetup {
    std::vector<std::string> kernels;  // empty: all built-ins
    double kernel_sign = 1.0;
    int quadrature_order = 256;
    int samples = 100;
};

struct SIOSetup {
    std::string kernel = "biot-savart-2d";
    double kernel_sign = 1.0;
    int i = 0;  // 0-based internally
    int j = 1;
    std::vector<double> widths{1.0, 0.5, 0.25};
    std::vector<double> h_list{1.0 / 16, 1.0 / 32};
    double gamma = 0.5;
    double epsilon_factor = 2.0;  // excision radius in lattice spacings
};

struct RunConfig {
    Command command = Command::simulate;
    std::filesystem::path output_dir = "out";
    std::uint64_t seed = 0;
    int workers = 1;
    std::map<std::string, std::string> explicit_values;  // canonical section.key -> value as given

    SimulateSetup simulate;
    ContinuitySweepConfig sweep;
    ConvergenceConfig convergence;
    NormsSetup norms;
    KernelsSetup kernels;
    SIOSetup sio;
    LemmaSuiteOptions lemmas;
};

/// Parses INI text plus `key=value` overrides (overrides win). Every problem
/// (unknown key, bad value, range violation, kernel/dimension mismatch) is
/// collected into one ConfigError.
RunConfig parse_config_text(Command command, const std::string& text,
                            const std::vector<std::string>& overrides = {});

/// Reads `file` (when given) and delegates to parse_config_text. Relative paths
/// (output_dir, input CSVs) are resolved against the current directory.
RunConfig parse_config(Command command, const std::optional<std::filesystem::path>& file,
                       const std::vector<std::string>& overrides = {});

/// Double with `a/b` fraction support.
double parse_real(const std::string& s);

// ---------------------------------------------------------------------------
// CSV

inline constexpr int kSchemaVersion = 1;

/// 17 significant digits: parses back to the identical double.
std::string format_real(double v);

struct CsvTable {
    std::string schema;  // e.g. "nlt-markers/1"
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
    std::string render() const;
};

/// Reads a CSV written by this library; `# schema:` is required when `expect_schema`
/// is non-empty and must match it exactly.
CsvTable read_csv(const std::filesystem::path& path, const std::string& expect_schema = "");
std::vector<double> column(const CsvTable& t, const std::string& name);

// ---------------------------------------------------------------------------
// Output directory and manifest

struct FileEntry {
    std::string name;
    std::string schema;
    std::uintmax_t bytes = 0;
    std::string sha256;
};

struct RunManifest {
    std::string tool = "nlt";
    std::string version = kVersion;
    std::string command;
    std::map<std::string, std::string> config;
    std::uint64_t seed = 0;
    int workers = 1;
    std::string started;
    std::string finished;
    std::vector<FileEntry> files;
    std::string halt_reason = "completed";
    int exit_code = 0;
};

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Collects output files for one run. Files go through a temporary name and are
/// renamed into place; abort() (or destruction before finish()) removes every
/// file written so far. finish() writes manifest.json last, atomically.
class OutputWriter {
public:
    explicit OutputWriter(std::filesystem::path dir);
    ~OutputWriter();
    OutputWriter(const OutputWriter&) = delete;
    OutputWriter& operator=(const OutputWriter&) = delete;

    void write_csv(const std::string& name, const CsvTable& table);
    void write_json(const std::string& name, const std::string& schema, const std::string& json_text);
    RunManifest finish(RunManifest manifest);
    void abort();
    const std::filesystem::path& dir() const { return dir_; }

private:
    void write_file(const std::string& name, const std::string& schema, const std::string& bytes);

    std::filesystem::path dir_;
    std::vector<FileEntry> files_;
    bool finished_ = false;
};

std::string manifest_json(const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& path);
std::string utc_timestamp();

// ---------------------------------------------------------------------------
// Tables for each result type (the schemas in docs/file_formats.md)

/// markers.csv: one block per snapshot (t = 0, checkpoints, final state).
CsvTable markers_table(const TrajectoryRecord& rec, const MarkerLattice& lattice);
CsvTable monitors_table(const TrajectoryRecord& rec);
/// density.csv: reconstructed density on the evaluation lattice at every snapshot.
CsvTable density_table(const TrajectoryRecord& rec, const MarkerLattice& lattice,
                       const LatticeGeometry& eval, Interpolation method);
CsvTable sweep_table(const SweepReport& rep);
std::string sweep_fit_json(const SweepReport& rep);
CsvTable convergence_table(const ConvergenceReport& rep);
CsvTable orders_table(const ConvergenceReport& rep);
CsvTable kernels_table(const std::vector<KernelValidation>& v);
CsvTable dirac_table(const std::vector<KernelValidation>& v);
CsvTable sio_table(const std::vector<SIOReport>& reports);
CsvTable modulus_table(const NormReport& rep);
std::string norms_json(const NormReport& rep);
CsvTable inequalities_table(const LemmaSuiteReport& rep);
std::string lemmas_json(const LemmaSuiteReport& rep);

/// Reads x_1..x_n,value samples; lattice_spacing > 0 reassembles them into a lattice field.
SampledField read_sampled_field(const std::filesystem::path& path, int dim, double lattice_spacing);

// ---------------------------------------------------------------------------
// Commands

struct RunResult {
    RunManifest manifest;
    int exit_code = 0;  // 0, or 3 when a run lost admissibility / a check failed numerically
};

/// Executes the command and writes its outputs into cfg.output_dir.
/// Errors propagate as nlt::Error (ConfigError, NumericalError, IoError); any
/// partially written files are removed first.
RunResult run_command(const RunConfig& cfg);

}  // namespace nlt
