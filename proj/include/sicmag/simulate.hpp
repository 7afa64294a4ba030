#pragma once

#include <vector>

#include "sicmag/config.hpp"
#include "sicmag/ensemble.hpp"
#include "sicmag/lindblad.hpp"
#include "sicmag/protocol.hpp"
#include "sicmag/spin.hpp"
#include "sicmag/trace.hpp"

namespace sicmag {

// Everything the sequence engine needs about the physical model.
struct ModelTerms {
    HamiltonianParams hamiltonian;  // D, gamma, B0; no drive
    LevelScheme scheme;
    RateSet rates;
    RelaxationParams relaxation;
    EmissionModel emission;
    DetectorConfig detector;
};

ModelTerms terms_from(const RunConfig& config);

// Per-ensemble-member pulse-sequence engine. The member detuning shifts the
// zero-field splitting (common-mode shift of both transitions); the member
// B1 scale multiplies every drive amplitude. One rotating frame (the RF
// carrier) is shared by the whole sequence. Caches one propagator per
// distinct segment controls; not thread-safe, use one instance per worker.
class SequenceSimulator {
public:
    SequenceSimulator(const ModelTerms& terms, const EvolutionSettings& settings,
                      const EnsembleMember& member);

    // Mean collected fluorescence rate (counts/s) in the readout window.
    double readout_signal(const PulseSequence& seq);

    // Collected fluorescence rate at the given absolute times across the
    // segment list (grid must be ascending and within the total duration).
    std::vector<double> sample_rates(const std::vector<Segment>& segments,
                                     const std::vector<double>& t_grid);

    // CW observable: steady state of the continuous controls.
    double cw_signal(const Segment& controls);

private:
    struct CachedPropagator;

    Matrix hamiltonian_for(const Segment& seg, double carrier_hz) const;
    std::vector<Matrix> ops_for(const Segment& seg) const;
    const CachedPropagator& propagator_for(const Segment& seg, double carrier_hz);
    Vector advance(const Vector& state, const Segment& seg, double dt, double carrier_hz,
                   double t0_abs);
    double rate_of(const Vector& state) const;
    Vector initial_state() const;
    static double sequence_carrier(const std::vector<Segment>& segments);

    ModelTerms terms_;
    EvolutionSettings settings_;
    EnsembleMember member_;
    std::vector<std::pair<std::size_t, CachedPropagator>> cache_;
    Matrix dissipator_laser_on_;   // reused across CW sweep points
    bool have_cw_dissipator_ = false;
    double cw_dissipator_power_ = 0.0;
};

struct SweepResult {
    ProtocolKind kind = ProtocolKind::rabi;
    std::string sweep_label;
    std::vector<double> sweep;
    std::vector<double> signal_cps;             // ensemble-mean readout rate
    std::vector<double> counts_per_shot;        // rate x readout window
    std::vector<double> shot_noise_std;         // sqrt(counts per shot)
    std::vector<double> noisy_counts_per_shot;  // Poisson realization (noise.poisson)
    std::vector<Trace> traces;                  // per-point traces (output.write_traces)
};

// Run the configured protocol over its sweep, ensemble-averaged, with the
// worker pool parallelizing over ensemble members. Deterministic for fixed
// config + seed regardless of thread count.
SweepResult run_protocol(const RunConfig& config);

// sweep.csv + plot.gp + config echo + per-point traces; returns the list
// of files written (relative to dir).
std::vector<std::string> write_sweep_outputs(const RunConfig& config, const SweepResult& result,
                                             const std::string& dir);

// Fluorescence-rate trace of one lock-in modulation period (low half then
// high half) on a uniform grid at the given sample rate.
Trace lockin_rate_trace(SequenceSimulator& sim, const LockinPeriod& period,
                        double sample_rate_hz);

}  // namespace sicmag
