// Command-line front-end: Monte Carlo key-error-rate experiments, parameter
// sweeps, the code registry, model reports, and a file-based
// enroll/reconstruct demo.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pufcc/io.hpp"
#include "pufcc/simulator.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitShortage = 3;

struct SimFlags {
  std::string code_text = "2,1,6:133,171";
  double pt = -1.0;  // negative = use all bits
  std::string decoder = "viterbi";
  std::string input = "soft";
  std::size_t list_size = 1;
  int readouts = 1;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 42;
  unsigned workers = 0;
  double fano_delta = 2.0;
  std::uint64_t fano_max_visits = 0;
  bool fixed_device = false;
  std::string format = "csv";
  std::string out_path;
};

void add_sim_flags(CLI::App* cmd, SimFlags* f) {
  cmd->add_option("--code", f->code_text, "code in n,k,mu:g(n-1),...,g0 octal form");
  cmd->add_option("--pt", f->pt, "reliability threshold p_T; omit to use all bits");
  cmd->add_option("--decoder", f->decoder, "viterbi|fano")->check(CLI::IsMember({"viterbi", "fano"}));
  cmd->add_option("--input", f->input, "soft|hard")->check(CLI::IsMember({"soft", "hard"}));
  cmd->add_option("--list", f->list_size, "list size");
  cmd->add_option("--readouts", f->readouts, "number of readouts m");
  cmd->add_option("--trials", f->trials, "number of simulated extractions");
  cmd->add_option("--seed", f->seed, "rng seed");
  cmd->add_option("--workers", f->workers, "worker threads (0 = hardware)");
  cmd->add_option("--fano-delta", f->fano_delta, "Fano threshold increment");
  cmd->add_option("--fano-max-visits", f->fano_max_visits, "Fano node-visit budget (0 = default)");
  cmd->add_flag("--fixed-device", f->fixed_device, "reuse one device, resample noise only");
  cmd->add_option("--format", f->format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", f->out_path, "output file (default stdout)");
}

pufcc::ExperimentConfig make_config(const SimFlags& f) {
  pufcc::ExperimentConfig cfg;
  cfg.code = pufcc::CodeSpec::from_text(f.code_text);
  if (f.pt > 0.0) cfg.p_t = f.pt;
  cfg.decoder = pufcc::decoder_from_string(f.decoder);
  cfg.input = pufcc::input_mode_from_string(f.input);
  cfg.list_size = f.list_size;
  cfg.readouts = f.readouts;
  cfg.trials = f.trials;
  cfg.seed = f.seed;
  cfg.fano.delta = f.fano_delta;
  cfg.fano.max_visits = f.fano_max_visits;
  cfg.fixed_device = f.fixed_device;
  cfg.validate();
  return cfg;
}

std::ostream& open_output(const std::string& path, std::ofstream& file, std::ostream& fallback) {
  if (path.empty()) return fallback;
  file.open(path);
  if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
  return file;
}

nlohmann::json result_json(const pufcc::ExperimentConfig& cfg, const pufcc::ExperimentResult& r) {
  nlohmann::json j;
  j["code"] = cfg.code.to_text();
  j["mu"] = cfg.code.mu;
  if (cfg.p_t) {
    j["pt"] = *cfg.p_t;
  } else {
    j["pt"] = nullptr;
  }
  j["decoder"] = pufcc::to_string(cfg.decoder);
  j["input"] = pufcc::to_string(cfg.input);
  j["list"] = cfg.list_size;
  j["readouts"] = cfg.readouts;
  j["trials"] = r.trials;
  j["errors"] = r.errors;
  j["ker"] = r.ker;
  j["ci_low"] = r.ci_low;
  j["ci_high"] = r.ci_high;
  j["seed"] = cfg.seed;
  j["mean_decoder_effort"] = r.mean_decoder_effort;
  j["wall_s"] = r.wall_s;
  return j;
}

pufcc::SweepAxis parse_axis(const std::string& text) {
  auto eq = text.find('=');
  if (eq == std::string::npos)
    throw pufcc::ConfigError("axis must look like pt=0.1,0.2 or m=1,3 or code=...;...");
  std::string name = text.substr(0, eq);
  std::string values = text.substr(eq + 1);
  pufcc::SweepAxis axis{};
  if (name == "pt") {
    axis.kind = pufcc::SweepAxis::Kind::p_t;
    std::istringstream is(values);
    std::string tok;
    while (std::getline(is, tok, ',')) axis.p_t_values.push_back(std::stod(tok));
  } else if (name == "m") {
    axis.kind = pufcc::SweepAxis::Kind::readouts;
    std::istringstream is(values);
    std::string tok;
    while (std::getline(is, tok, ',')) axis.readout_values.push_back(std::stoi(tok));
  } else if (name == "code") {
    axis.kind = pufcc::SweepAxis::Kind::code;
    std::istringstream is(values);
    std::string tok;
    while (std::getline(is, tok, ';'))
      axis.code_values.push_back(pufcc::CodeSpec::from_text(tok));
  } else {
    throw pufcc::ConfigError("unknown sweep axis '" + name + "'");
  }
  if (axis.size() == 0) throw pufcc::ConfigError("sweep axis is empty");
  return axis;
}

std::vector<double> parse_grid(const std::string& text) {
  // "start:stop:step"
  double start = 0, stop = 0, step = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3 || step <= 0)
    throw pufcc::ConfigError("grid must look like start:stop:step");
  std::vector<double> grid;
  for (double x = start; x <= stop + 1e-12; x += step) grid.push_back(x);
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SRAM PUF key extraction simulator"};
  app.require_subcommand(1);

  SimFlags sim_flags;
  auto* simulate = app.add_subcommand("simulate", "run one Monte Carlo experiment");
  add_sim_flags(simulate, &sim_flags);

  SimFlags sweep_flags;
  std::string axis_text;
  auto* sweep = app.add_subcommand("sweep", "run one experiment per axis point");
  add_sim_flags(sweep, &sweep_flags);
  sweep->add_option("--axis", axis_text, "pt=...|m=...|code=a;b")->required();

  auto* codes = app.add_subcommand("codes", "print the code registry");

  std::string pt_grid_text = "0.01:0.5:0.01";
  bool want_ignored = false;
  std::string model_out;
  auto* model = app.add_subcommand("model", "reliability model reports");
  model->add_flag("--ignored-fraction", want_ignored, "emit ignored-bit fraction over a p_T grid");
  model->add_option("--pt-grid", pt_grid_text, "grid start:stop:step");
  model->add_option("--out", model_out, "output file (default stdout)");

  std::string snap_path, rel_path, helper_path, code_text = "2,1,6:133,171";
  double enroll_pt = -1.0;
  std::uint64_t enroll_seed = 42;
  auto* enroll_cmd = app.add_subcommand("enroll", "derive a key and helper data from a snapshot");
  enroll_cmd->add_option("--snapshots", snap_path, "snapshot file")->required();
  enroll_cmd->add_option("--reliabilities", rel_path, "reliability sidecar (default <snapshots>.rel.csv)");
  enroll_cmd->add_option("--code", code_text, "code spec");
  enroll_cmd->add_option("--pt", enroll_pt, "reliability threshold; omit to use all bits");
  enroll_cmd->add_option("--seed", enroll_seed, "key rng seed");
  enroll_cmd->add_option("--helper", helper_path, "output helper-data JSON")->required();

  std::string rec_snap, rec_rel, rec_helper;
  auto* rec_cmd = app.add_subcommand("reconstruct", "regenerate the key from a noisy snapshot");
  rec_cmd->add_option("--snapshots", rec_snap, "snapshot file")->required();
  rec_cmd->add_option("--reliabilities", rec_rel, "reliability sidecar (default <snapshots>.rel.csv)");
  rec_cmd->add_option("--helper", rec_helper, "helper-data JSON")->required();

  std::size_t snap_cells = 2048;
  int snap_readouts = 1;
  std::uint64_t snap_seed = 1;
  std::string snap_out;
  auto* snap_cmd = app.add_subcommand("snapshot", "sample a synthetic device snapshot");
  snap_cmd->add_option("--cells", snap_cells, "number of cells");
  snap_cmd->add_option("--readouts", snap_readouts, "readouts to record");
  snap_cmd->add_option("--seed", snap_seed, "rng seed");
  snap_cmd->add_option("--out", snap_out, "snapshot file (sidecar gets .rel.csv appended)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      auto cfg = make_config(sim_flags);
      auto res = pufcc::run_experiment(cfg, sim_flags.workers);
      std::ofstream file;
      auto& os = open_output(sim_flags.out_path, file, std::cout);
      if (sim_flags.format == "json") {
        os << result_json(cfg, res).dump(2) << "\n";
      } else {
        os << pufcc::csv_header() << "\n" << pufcc::csv_row(cfg, res) << "\n";
      }
      std::cerr << cfg.code.name() << " ker=" << pufcc::ker_display(res) << " (" << res.errors
                << "/" << res.trials << ")\n";
    } else if (*sweep) {
      auto cfg = make_config(sweep_flags);
      auto axis = parse_axis(axis_text);
      auto rows = pufcc::run_sweep(cfg, axis, sweep_flags.workers);
      std::ofstream file;
      auto& os = open_output(sweep_flags.out_path, file, std::cout);
      if (sweep_flags.format == "json") {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& row : rows) j.push_back(result_json(row.cfg, row.result));
        os << j.dump(2) << "\n";
      } else {
        os << pufcc::csv_header() << "\n";
        for (const auto& row : rows) os << pufcc::csv_row(row.cfg, row.result) << "\n";
      }
    } else if (*codes) {
      for (const auto& c : pufcc::registry()) {
        std::cout << c.name() << "  " << c.to_text() << "\n";
      }
    } else if (*model) {
      if (!want_ignored) throw pufcc::ConfigError("model: nothing to do (try --ignored-fraction)");
      auto rows = pufcc::ignored_fraction_report(parse_grid(pt_grid_text));
      std::ofstream file;
      auto& os = open_output(model_out, file, std::cout);
      os << "pt,ignored_fraction\n";
      for (auto [pt, frac] : rows) os << pt << "," << frac << "\n";
    } else if (*enroll_cmd) {
      auto snap = pufcc::read_snapshot_file(snap_path);
      auto p_e = pufcc::read_reliability_file(rel_path.empty() ? snap_path + ".rel.csv" : rel_path);
      if (p_e.size() < snap.cell_count) throw std::runtime_error("reliability sidecar too short");
      // reference bit = majority over the recorded readouts, ties toward 0
      auto ref = pufcc::majority_vote(snap.readouts);
      std::vector<pufcc::SramCell> cells(snap.cell_count);
      for (std::size_t i = 0; i < snap.cell_count; ++i) {
        cells[i] = pufcc::cell_from_p_one(ref[i] ? 1.0 - p_e[i] : p_e[i]);
      }
      auto spec = pufcc::CodeSpec::from_text(code_text);
      pufcc::Rng rng(enroll_seed);
      std::optional<double> pt;
      if (enroll_pt > 0.0) pt = enroll_pt;
      auto res = pufcc::enroll(cells, spec, pt, rng);
      pufcc::write_helper_file(helper_path, res.helper);
      auto packed = pufcc::pack_bits(res.key);
      std::cout << pufcc::hex_encode(packed.data(), packed.size()) << "\n";
    } else if (*rec_cmd) {
      auto snap = pufcc::read_snapshot_file(rec_snap);
      auto p_e = pufcc::read_reliability_file(rec_rel.empty() ? rec_snap + ".rel.csv" : rec_rel);
      auto helper = pufcc::read_helper_file(rec_helper);
      auto key = pufcc::reconstruct(snap.readouts, helper, p_e);
      if (!key) {
        std::cerr << "reconstruction failed: no candidate matched the stored digest\n";
        return 1;
      }
      auto packed = pufcc::pack_bits(*key);
      std::cout << pufcc::hex_encode(packed.data(), packed.size()) << "\n";
    } else if (*snap_cmd) {
      pufcc::Rng rng(snap_seed);
      std::vector<pufcc::SramCell> cells(snap_cells);
      std::vector<double> p_e(snap_cells);
      for (std::size_t i = 0; i < snap_cells; ++i) {
        cells[i] = pufcc::sample_cell(rng);
        p_e[i] = cells[i].p_e;
      }
      pufcc::Snapshot snap;
      snap.cell_count = snap_cells;
      snap.readouts.resize(snap_readouts, std::vector<int>(snap_cells));
      for (auto& r : snap.readouts) {
        for (std::size_t i = 0; i < snap_cells; ++i) r[i] = pufcc::readout(cells[i], rng);
      }
      pufcc::write_snapshot_file(snap_out, snap);
      pufcc::write_reliability_file(snap_out + ".rel.csv", p_e);
    }
  } catch (const pufcc::ShortageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitShortage;
  } catch (const pufcc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
