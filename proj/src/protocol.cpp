#include "sicmag/protocol.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sicmag {

using std::numbers::pi;

double PulseSequence::total_duration_s() const {
    double total = 0.0;
    for (const Segment& s : segments) total += s.duration_s;
    return total;
}

void PulseSequence::validate() const {
    for (const Segment& s : segments) {
        if (s.duration_s < 0.0) throw std::invalid_argument("Segment: negative duration");
        if (s.rf.on && s.rf.b1_t < 0.0) throw std::invalid_argument("Segment: negative B1");
    }
    if (!continuous) {
        if (readout.segment_index >= segments.size())
            throw std::invalid_argument("PulseSequence: readout segment out of range");
        const Segment& r = segments[readout.segment_index];
        if (readout.offset_s < 0.0 ||
            readout.offset_s + readout.width_s > r.duration_s + 1e-15)
            throw std::invalid_argument("PulseSequence: readout window outside its segment");
    }
}

double pi_pulse_duration(double b1_t, double gamma_hz_per_t) {
    if (b1_t <= 0.0) throw std::invalid_argument("pi_pulse_duration: b1_t must be > 0");
    if (gamma_hz_per_t <= 0.0)
        throw std::invalid_argument("pi_pulse_duration: gamma must be > 0");
    const double omega_r = std::sqrt(3.0) / 2.0 * gamma_hz_per_t * b1_t;
    return 1.0 / (2.0 * omega_r);
}

void SweepPlan::validate() const {
    if (sweep.empty()) throw std::invalid_argument("SweepPlan: swept list must be nonempty");
    for (size_t i = 1; i < sweep.size(); ++i)
        if (sweep[i] <= sweep[i - 1])
            throw std::invalid_argument("SweepPlan: swept list must be strictly increasing");
    if (t_init_s < 0.0 || t_read_s < 0.0)
        throw std::invalid_argument("SweepPlan: laser pulse durations must be >= 0");
    if (readout_width_s <= 0.0)
        throw std::invalid_argument("SweepPlan: readout width must be > 0");

    const bool needs_rf = kind != ProtocolKind::t1;
    if (needs_rf && b1_t <= 0.0)
        throw std::invalid_argument("SweepPlan: missing parameter b1_t");
    if (kind != ProtocolKind::cw_odmr && kind != ProtocolKind::pulsed_odmr &&
        kind != ProtocolKind::t1 && f_drive_hz <= 0.0)
        throw std::invalid_argument("SweepPlan: missing parameter f_drive_hz");
    if (needs_rf && kind != ProtocolKind::cw_odmr && pi_pulse_s <= 0.0 &&
        gamma_hz_per_t <= 0.0)
        throw std::invalid_argument(
            "SweepPlan: missing parameter gamma_hz_per_t (or explicit pi_pulse_s)");
    for (double v : sweep)
        if (v < 0.0) throw std::invalid_argument("SweepPlan: negative sweep value");
}

double SweepPlan::pi_duration() const {
    if (pi_pulse_s > 0.0) return pi_pulse_s;
    return pi_pulse_duration(b1_t, gamma_hz_per_t);
}

namespace {

Segment laser_segment(const SweepPlan& plan, double duration) {
    Segment s;
    s.duration_s = duration;
    s.laser = {true, plan.laser_power_w};
    return s;
}

Segment rf_segment(const SweepPlan& plan, double duration, double f_hz, double phase_rad) {
    Segment s;
    s.duration_s = duration;
    s.rf = {true, plan.b1_t, f_hz, phase_rad};
    return s;
}

Segment wait_segment(double duration) {
    Segment s;
    s.duration_s = duration;
    return s;
}

PulseSequence finish(PulseSequence seq, const SweepPlan& plan, double sweep_value) {
    seq.readout.segment_index = seq.segments.size() - 1;
    seq.readout.offset_s = plan.readout_offset_s;
    seq.readout.width_s = std::min(plan.readout_width_s, plan.t_read_s);
    seq.sweep_value = sweep_value;
    seq.validate();
    return seq;
}

}  // namespace

std::vector<PulseSequence> make_protocol(ProtocolKind kind, const SweepPlan& plan) {
    SweepPlan p = plan;
    p.kind = kind;
    p.validate();

    std::vector<PulseSequence> out;
    out.reserve(p.sweep.size());

    switch (kind) {
        case ProtocolKind::cw_odmr: {
            for (double f : p.sweep) {
                PulseSequence seq;
                seq.continuous = true;
                Segment s;
                s.duration_s = 0.0;
                s.laser = {true, p.laser_power_w};
                s.rf = {true, p.b1_t, f, 0.0};
                seq.segments.push_back(s);
                seq.sweep_value = f;
                seq.validate();
                out.push_back(seq);
            }
            return out;
        }
        case ProtocolKind::t1: {
            for (double tau : p.sweep) {
                PulseSequence seq;
                seq.segments.push_back(laser_segment(p, p.t_init_s));
                seq.segments.push_back(wait_segment(tau));
                seq.segments.push_back(laser_segment(p, p.t_read_s));
                out.push_back(finish(std::move(seq), p, tau));
            }
            return out;
        }
        case ProtocolKind::rabi: {
            for (double tau : p.sweep) {
                PulseSequence seq;
                seq.segments.push_back(laser_segment(p, p.t_init_s));
                seq.segments.push_back(rf_segment(p, tau, p.f_drive_hz, 0.0));
                seq.segments.push_back(laser_segment(p, p.t_read_s));
                out.push_back(finish(std::move(seq), p, tau));
            }
            return out;
        }
        case ProtocolKind::pulsed_odmr: {
            const double t_pi = p.pi_duration();
            for (double f : p.sweep) {
                PulseSequence seq;
                seq.segments.push_back(laser_segment(p, p.t_init_s));
                seq.segments.push_back(rf_segment(p, t_pi, f, 0.0));
                seq.segments.push_back(laser_segment(p, p.t_read_s));
                out.push_back(finish(std::move(seq), p, f));
            }
            return out;
        }
        case ProtocolKind::ramsey: {
            const double t_half = p.pi_duration() / 2.0;
            const double f_carrier = p.f_drive_hz + p.detuning_hz;
            for (double tau : p.sweep) {
                PulseSequence seq;
                seq.segments.push_back(laser_segment(p, p.t_init_s));
                seq.segments.push_back(rf_segment(p, t_half, f_carrier, 0.0));
                seq.segments.push_back(wait_segment(tau));
                seq.segments.push_back(rf_segment(p, t_half, f_carrier, 0.0));
                seq.segments.push_back(laser_segment(p, p.t_read_s));
                out.push_back(finish(std::move(seq), p, tau));
            }
            return out;
        }
        case ProtocolKind::hahn_echo: {
            const double t_pi = p.pi_duration();
            // The y projection inverts the final pulse carrier so the echo
            // is read out with opposite sign, giving the mirrored pair of
            // traces about the unpolarized baseline.
            const double final_phase = p.final_phase == PulsePhase::x ? 0.0 : pi;
            for (double tau : p.sweep) {
                PulseSequence seq;
                seq.segments.push_back(laser_segment(p, p.t_init_s));
                seq.segments.push_back(rf_segment(p, t_pi / 2.0, p.f_drive_hz, 0.0));
                seq.segments.push_back(wait_segment(tau / 2.0));
                seq.segments.push_back(rf_segment(p, t_pi, p.f_drive_hz, 0.0));
                seq.segments.push_back(wait_segment(tau / 2.0));
                seq.segments.push_back(rf_segment(p, t_pi / 2.0, p.f_drive_hz, final_phase));
                seq.segments.push_back(laser_segment(p, p.t_read_s));
                out.push_back(finish(std::move(seq), p, tau));
            }
            return out;
        }
    }
    throw std::invalid_argument("make_protocol: unknown protocol kind");
}

LockinPeriod wrap_lockin(const PulseSequence& seq, int n_repeat, double f_mod_hz) {
    if (n_repeat < 1) throw std::invalid_argument("wrap_lockin: n_repeat must be >= 1");
    if (f_mod_hz <= 0.0) throw std::invalid_argument("wrap_lockin: f_mod must be > 0");
    seq.validate();

    const double half_period = 1.0 / (2.0 * f_mod_hz);
    const double block = n_repeat * seq.total_duration_s();
    if (block > half_period) {
        const double f_max = 1.0 / (2.0 * block);
        throw std::invalid_argument("wrap_lockin: sequences do not fit in the half-period; "
                                    "f_mod must be at most " +
                                    std::to_string(f_max) + " Hz");
    }

    LockinPeriod out;
    out.f_mod_hz = f_mod_hz;
    out.n_repeat = n_repeat;
    for (int r = 0; r < n_repeat; ++r) {
        for (const Segment& s : seq.segments) {
            Segment low = s;
            low.rf = RfControl{};  // low half: just the laser
            out.low_half.push_back(low);
            out.high_half.push_back(s);
        }
    }
    const double pad = half_period - block;
    if (pad > 0.0) {
        out.low_half.push_back(wait_segment(pad));
        out.high_half.push_back(wait_segment(pad));
    }
    return out;
}

std::string to_string(ProtocolKind kind) {
    switch (kind) {
        case ProtocolKind::cw_odmr: return "cw_odmr";
        case ProtocolKind::pulsed_odmr: return "pulsed_odmr";
        case ProtocolKind::rabi: return "rabi";
        case ProtocolKind::ramsey: return "ramsey";
        case ProtocolKind::hahn_echo: return "hahn_echo";
        case ProtocolKind::t1: return "t1";
    }
    return "unknown";
}

ProtocolKind protocol_kind_from_string(const std::string& name) {
    if (name == "cw_odmr") return ProtocolKind::cw_odmr;
    if (name == "pulsed_odmr") return ProtocolKind::pulsed_odmr;
    if (name == "rabi") return ProtocolKind::rabi;
    if (name == "ramsey") return ProtocolKind::ramsey;
    if (name == "hahn_echo") return ProtocolKind::hahn_echo;
    if (name == "t1") return ProtocolKind::t1;
    throw std::invalid_argument("unknown protocol kind: " + name);
}

}  // namespace sicmag
