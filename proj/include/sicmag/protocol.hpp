#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace sicmag {

struct LaserControl {
    bool on = false;
    double power_w = 0.0;
};

struct RfControl {
    bool on = false;
    double b1_t = 0.0;
    double f_hz = 0.0;
    double phase_rad = 0.0;
};

struct Segment {
    double duration_s = 0.0;
    LaserControl laser;
    RfControl rf;
};

// Sub-interval of one segment whose fluorescence constitutes the data point.
struct ReadoutWindow {
    std::size_t segment_index = 0;
    double offset_s = 0.0;
    double width_s = 0.0;
};

struct PulseSequence {
    std::vector<Segment> segments;
    ReadoutWindow readout;
    bool continuous = false;  // CW protocols: observable comes from the steady state
    double sweep_value = 0.0;

    double total_duration_s() const;
    void validate() const;
};

enum class ProtocolKind { cw_odmr, pulsed_odmr, rabi, ramsey, hahn_echo, t1 };

enum class PulsePhase { x, y };

// Sweep plan: the swept variable list plus every fixed pulse parameter.
// Laser initialization and readout default to the 12 us used throughout the
// pulsed measurements; the readout window to the first 2 us of the readout
// pulse (the spin-dependent fluorescence transient).
struct SweepPlan {
    ProtocolKind kind = ProtocolKind::rabi;
    std::vector<double> sweep;  // tau list (s), frequency list (Hz), or B1 list (T)

    double t_init_s = 12e-6;
    double t_read_s = 12e-6;
    double laser_power_w = 36e-3;
    double b1_t = 0.0;          // drive amplitude for pulsed protocols
    double f_drive_hz = 0.0;    // resonance frequency to address
    double detuning_hz = 0.0;   // Ramsey detuning, applied to the carrier
    PulsePhase final_phase = PulsePhase::x;  // Hahn-echo projection phase
    double readout_offset_s = 0.0;
    double readout_width_s = 2e-6;
    double gamma_hz_per_t = 0.0;  // for analytic pi-pulse calibration
    double pi_pulse_s = 0.0;      // explicit override; 0 = analytic from b1_t

    void validate() const;
    double pi_duration() const;  // resolved pi-pulse duration
};

// t_pi = 1/(2 Omega_R), Omega_R = (sqrt(3)/2) gamma B1 for the
// |+-1/2> <-> |+-3/2> transitions in the RWA.
double pi_pulse_duration(double b1_t, double gamma_hz_per_t);

// One sequence per sweep point. The whole sequence shares one rotating
// frame (the RF carrier), so free-evolution phase accumulates at the
// detuning with no extra bookkeeping.
std::vector<PulseSequence> make_protocol(ProtocolKind kind, const SweepPlan& plan);

// One lock-in modulation period: n_repeat repetitions with the RF forced
// off (low half, laser only), then n_repeat repetitions as given (high
// half), each half padded to 1/(2 f_mod).
struct LockinPeriod {
    std::vector<Segment> low_half;
    std::vector<Segment> high_half;
    double f_mod_hz = 0.0;
    int n_repeat = 0;
    double period_s() const { return f_mod_hz > 0.0 ? 1.0 / f_mod_hz : 0.0; }
};

LockinPeriod wrap_lockin(const PulseSequence& seq, int n_repeat, double f_mod_hz);

std::string to_string(ProtocolKind kind);
ProtocolKind protocol_kind_from_string(const std::string& name);

}  // namespace sicmag
