#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fiberlink/config.hpp"
#include "fiberlink/link.hpp"
#include "fiberlink/postproc.hpp"

namespace fiberlink {

/// A fully specified simulation run: topology plus per-element noise models,
/// record length and seed. Reproducible from the file content alone.
struct Scenario {
    std::string name;
    std::uint64_t seed = 0;
    std::size_t n = 0;
    double gate_s = constants::default_gate_s;
    double nu0_hz = constants::default_nu0_hz;
    double t0_mjd = 57849.0;
    LinkTopology topo;
    SimSpecs specs;
};

Scenario load_scenario(const config::Table& t);
NoiseSpec load_noise(const config::Table& t, double gate_s);
ThermalModel load_thermal(const config::Table& t, double nu0_hz, double default_length_m = 0.0);
UncertaintyBudget load_budget(const config::Table& t);
FrequencyPlan load_plan(const config::Table& t);
SelectionConfig load_selection(const config::Table& t);
std::vector<Span> load_spans(const config::Table& t);

struct SimulateOutputs {
    std::vector<std::string> files;  // paths relative to out_dir
};

/// Runs the scenario and writes remote.dat / end_to_end.dat / monitor.dat,
/// per-element masks under masks/, and a manifest. Deterministic except for
/// the generated_at line of the manifest.
SimulateOutputs run_simulate(const Scenario& sc, const std::string& out_dir,
                             const std::string& config_path);

}  // namespace fiberlink
