#include "sicmag/simulate.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "sicmag/readout.hpp"
#include "sicmag/rng.hpp"

namespace sicmag {

namespace fs = std::filesystem;
using std::numbers::pi;

ModelTerms terms_from(const RunConfig& config) {
    ModelTerms t;
    t.hamiltonian.d_hz = config.model.d_hz;
    t.hamiltonian.gamma_hz_per_t = config.model.constants().gamma_hz_per_t();
    t.hamiltonian.b0_t = config.model.b0_t;
    t.scheme = LevelScheme::hybrid10();
    t.rates = config.rates;
    t.relaxation = config.model.relaxation();
    t.emission = config.emission;
    t.detector = config.detector;
    return t;
}

struct SequenceSimulator::CachedPropagator {
    SegmentPropagator prop;
    Matrix h_hz;  // kept for diagnostics
};

SequenceSimulator::SequenceSimulator(const ModelTerms& terms, const EvolutionSettings& settings,
                                     const EnsembleMember& member)
    : terms_(terms), settings_(settings), member_(member) {
    terms_.scheme.validate();
    terms_.rates.validate(terms_.scheme);
    settings_.validate();
}

double SequenceSimulator::sequence_carrier(const std::vector<Segment>& segments) {
    double carrier = 0.0;
    for (const Segment& s : segments) {
        if (!s.rf.on) continue;
        if (carrier == 0.0)
            carrier = s.rf.f_hz;
        else if (s.rf.f_hz != carrier)
            throw std::invalid_argument(
                "sequence uses more than one RF carrier; a single rotating frame requires one");
    }
    return carrier;
}

Matrix SequenceSimulator::hamiltonian_for(const Segment& seg, double carrier_hz) const {
    HamiltonianParams p = terms_.hamiltonian;
    p.d_hz += member_.detuning_hz / 2.0;  // common-mode shift of 2D
    if (settings_.frame == Frame::lab) {
        return embed_ground(ground_hamiltonian(p, 0.0), terms_.scheme);
    }
    if (carrier_hz <= 0.0) {
        // no RF anywhere in the sequence: static Hamiltonian, no frame
        return embed_ground(ground_hamiltonian(p, 0.0), terms_.scheme);
    }
    const double b1 = seg.rf.on ? seg.rf.b1_t * member_.b1_scale : 0.0;
    p.drive = DriveParams{b1, seg.rf.on ? seg.rf.f_hz : carrier_hz,
                          seg.rf.on ? seg.rf.phase_rad : 0.0};
    return embed_ground(rotating_frame_hamiltonian(p, carrier_hz), terms_.scheme);
}

std::vector<Matrix> SequenceSimulator::ops_for(const Segment& seg) const {
    const double power = seg.laser.on ? seg.laser.power_w : 0.0;
    std::vector<Matrix> ops = jump_operators(terms_.rates.active(power), terms_.scheme.n_levels);
    auto [la, lb] = relaxation_operators(terms_.relaxation, terms_.scheme);
    if (terms_.relaxation.alpha_per_s > 0.0) ops.push_back(std::move(la));
    if (terms_.relaxation.beta_per_s > 0.0) ops.push_back(std::move(lb));
    return ops;
}

namespace {

std::size_t segment_signature(const Segment& seg, double b1_scale) {
    auto mix = [](std::size_t h, uint64_t v) {
        return h ^ (std::hash<uint64_t>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    };
    std::size_t h = 0;
    h = mix(h, seg.laser.on ? std::bit_cast<uint64_t>(seg.laser.power_w) : 0);
    h = mix(h, seg.rf.on ? 1 : 0);
    h = mix(h, seg.rf.on ? std::bit_cast<uint64_t>(seg.rf.b1_t * b1_scale) : 0);
    h = mix(h, seg.rf.on ? std::bit_cast<uint64_t>(seg.rf.f_hz) : 0);
    h = mix(h, seg.rf.on ? std::bit_cast<uint64_t>(seg.rf.phase_rad) : 0);
    return h;
}

}  // namespace

const SequenceSimulator::CachedPropagator& SequenceSimulator::propagator_for(
    const Segment& seg, double carrier_hz) {
    const std::size_t sig = segment_signature(seg, member_.b1_scale);
    for (const auto& entry : cache_)
        if (entry.first == sig) return entry.second;
    Matrix h = hamiltonian_for(seg, carrier_hz);
    Matrix l = liouvillian(h, ops_for(seg));
    cache_.emplace_back(sig, CachedPropagator{SegmentPropagator(l), std::move(h)});
    return cache_.back().second;
}

Vector SequenceSimulator::advance(const Vector& state, const Segment& seg, double dt,
                                  double carrier_hz, double t0_abs) {
    if (dt <= 0.0) return state;
    if (settings_.frame == Frame::lab && seg.rf.on) {
        // time-dependent drive: integrate the segment adaptively
        SegmentGenerator gen;
        gen.h_hz = hamiltonian_for(seg, carrier_hz);
        const SpinOperators s = spin_matrices();
        gen.h_drive_hz = embed_ground(
            terms_.hamiltonian.gamma_hz_per_t * seg.rf.b1_t * member_.b1_scale * s.sx,
            terms_.scheme);
        gen.drive_f_hz = seg.rf.f_hz;
        gen.drive_phase_rad = seg.rf.phase_rad;
        gen.time_dependent = true;
        gen.jump_ops = ops_for(seg);
        const Eigen::Index n = terms_.scheme.n_levels;
        Matrix rho = Eigen::Map<const Matrix>(state.data(), n, n);
        StateTrace tr = propagate(rho, gen, dt, settings_, 1, t0_abs, terms_.scheme);
        return Eigen::Map<const Vector>(tr.rho.back().data(), n * n);
    }
    Vector w = propagator_for(seg, carrier_hz).prop.evolve(state, dt);
    const Eigen::Index n = terms_.scheme.n_levels;
    Eigen::Map<const Matrix> rho(w.data(), n, n);
    Matrix h = (rho + rho.adjoint()) / 2.0;
    return Eigen::Map<const Vector>(h.data(), n * n);
}

double SequenceSimulator::rate_of(const Vector& state) const {
    const Eigen::Index n = terms_.scheme.n_levels;
    Eigen::Map<const Matrix> rho(state.data(), n, n);
    return fluorescence_rate(rho, terms_.emission, terms_.detector);
}

Vector SequenceSimulator::initial_state() const {
    const int n = terms_.scheme.n_levels;
    Matrix rho = Matrix::Zero(n, n);
    for (int g : terms_.scheme.ground) rho(g, g) = 0.25;
    return Eigen::Map<const Vector>(rho.data(), n * n);
}

double SequenceSimulator::readout_signal(const PulseSequence& seq) {
    seq.validate();
    if (seq.continuous) return cw_signal(seq.segments.front());
    const double carrier = sequence_carrier(seq.segments);

    Vector state = initial_state();
    double t_abs = 0.0;
    for (std::size_t k = 0; k < seq.readout.segment_index; ++k) {
        state = advance(state, seq.segments[k], seq.segments[k].duration_s, carrier, t_abs);
        t_abs += seq.segments[k].duration_s;
    }
    const Segment& rd = seq.segments[seq.readout.segment_index];
    state = advance(state, rd, seq.readout.offset_s, carrier, t_abs);
    t_abs += seq.readout.offset_s;

    {
        const Eigen::Index n = terms_.scheme.n_levels;
        Eigen::Map<const Matrix> rho(state.data(), n, n);
        check_density(rho, terms_.scheme, "readout window");
    }

    // trapezoidal mean of the fluorescence over the window
    constexpr int n_samples = 32;
    const double dt = seq.readout.width_s / n_samples;
    double acc = 0.0;
    Vector cur = state;
    for (int i = 0; i <= n_samples; ++i) {
        const double w = (i == 0 || i == n_samples) ? 0.5 : 1.0;
        acc += w * rate_of(cur);
        if (i < n_samples) cur = advance(cur, rd, dt, carrier, t_abs + i * dt);
    }
    return acc / n_samples;
}

std::vector<double> SequenceSimulator::sample_rates(const std::vector<Segment>& segments,
                                                    const std::vector<double>& t_grid) {
    const double carrier = sequence_carrier(segments);
    std::vector<double> out;
    out.reserve(t_grid.size());

    Vector seg_start_state = initial_state();
    double seg_start_t = 0.0;
    std::size_t seg_idx = 0;
    for (double t : t_grid) {
        if (t < seg_start_t - 1e-15) throw std::invalid_argument("sample_rates: grid not sorted");
        while (seg_idx < segments.size() &&
               t > seg_start_t + segments[seg_idx].duration_s + 1e-15) {
            seg_start_state = advance(seg_start_state, segments[seg_idx],
                                      segments[seg_idx].duration_s, carrier, seg_start_t);
            seg_start_t += segments[seg_idx].duration_s;
            ++seg_idx;
        }
        if (seg_idx >= segments.size()) {
            if (t > seg_start_t + 1e-12)
                throw std::invalid_argument("sample_rates: grid beyond the sequence");
            out.push_back(rate_of(seg_start_state));
            continue;
        }
        const Vector at_t = advance(seg_start_state, segments[seg_idx], t - seg_start_t, carrier,
                                    seg_start_t);
        out.push_back(rate_of(at_t));
    }
    return out;
}

double SequenceSimulator::cw_signal(const Segment& controls) {
    if (!controls.rf.on || !controls.laser.on)
        throw std::invalid_argument("cw_signal: continuous controls need laser and RF on");
    const double f = controls.rf.f_hz;
    const Matrix h = hamiltonian_for(controls, f);

    const double power = controls.laser.power_w;
    if (!have_cw_dissipator_ || cw_dissipator_power_ != power) {
        dissipator_laser_on_ = dissipator_superop(ops_for(controls), terms_.scheme.n_levels);
        have_cw_dissipator_ = true;
        cw_dissipator_power_ = power;
    }

    const Eigen::Index n = terms_.scheme.n_levels;
    const Eigen::Index n2 = n * n;
    Matrix lk = hamiltonian_superop(h) + dissipator_laser_on_;
    const double scale = std::max(1.0, lk.cwiseAbs().maxCoeff());
    lk /= scale;
    Matrix m = lk;
    m.row(0).setZero();
    for (Eigen::Index i = 0; i < n; ++i) m(0, i * n + i) = 1.0;
    Vector b = Vector::Zero(n2);
    b(0) = 1.0;
    Eigen::PartialPivLU<Matrix> lu(m);
    Vector v = lu.solve(b);
    v += lu.solve(b - m * v);
    const double residual = (lk * v).norm();
    if (!std::isfinite(residual) || residual > 1e-8) {
        // fall back to long-time propagation from the mixed ground state
        const Segment& seg = controls;
        SegmentPropagator prop(lk * scale);
        const double slow = std::max(terms_.relaxation.alpha_per_s, 1e3);
        Vector st = initial_state();
        st = prop.evolve(st, 30.0 / slow);
        (void)seg;
        return rate_of(st);
    }
    return rate_of(v);
}

Trace lockin_rate_trace(SequenceSimulator& sim, const LockinPeriod& period,
                        double sample_rate_hz) {
    if (sample_rate_hz <= 0.0)
        throw std::invalid_argument("lockin_rate_trace: sample rate must be > 0");
    std::vector<Segment> all = period.low_half;
    all.insert(all.end(), period.high_half.begin(), period.high_half.end());

    double total = 0.0;
    for (const Segment& s : all) total += s.duration_s;
    const double dt = 1.0 / sample_rate_hz;
    const int n = static_cast<int>(std::floor(total / dt));

    Trace t;
    t.x_label = "time_s";
    t.y_label = "rate_cps";
    t.x.reserve(n);
    for (int i = 0; i < n; ++i) t.x.push_back(i * dt);
    t.y = sim.sample_rates(all, t.x);
    return t;
}

namespace {

std::string sweep_label_for(ProtocolKind kind) {
    switch (kind) {
        case ProtocolKind::cw_odmr:
        case ProtocolKind::pulsed_odmr: return "frequency_hz";
        default: return "tau_s";
    }
}

std::vector<double> trace_grid(const PulseSequence& seq, int points) {
    const double total = seq.total_duration_s();
    std::vector<double> grid;
    grid.reserve(points);
    for (int i = 0; i < points; ++i) grid.push_back(total * i / (points - 1) * (1.0 - 1e-12));
    return grid;
}

}  // namespace

SweepResult run_protocol(const RunConfig& config) {
    config.validate();
    const ModelTerms terms = terms_from(config);

    SweepPlan plan = config.plan;
    plan.kind = config.kind;
    plan.gamma_hz_per_t = terms.hamiltonian.gamma_hz_per_t;
    if (plan.f_drive_hz <= 0.0)
        plan.f_drive_hz = resonance_frequencies(terms.hamiltonian).second;

    const std::vector<PulseSequence> sequences = make_protocol(config.kind, plan);
    const std::vector<EnsembleMember> members =
        ensemble_members(config.ensemble, config.seed.value_or(0));

    const std::size_t n_points = sequences.size();
    const bool want_traces =
        config.output.write_traces && config.kind != ProtocolKind::cw_odmr;
    constexpr int trace_points = 512;

    struct MemberCurve {
        std::vector<double> signal;
        std::vector<double> traces;  // flattened n_points x trace_points
    };
    std::vector<MemberCurve> curves(members.size());

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&]() {
        while (true) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= members.size()) break;
            try {
                SequenceSimulator sim(terms, config.evolution, members[idx]);
                MemberCurve& curve = curves[idx];
                curve.signal.reserve(n_points);
                for (const PulseSequence& seq : sequences) {
                    curve.signal.push_back(sim.readout_signal(seq));
                    if (want_traces) {
                        const auto grid = trace_grid(seq, trace_points);
                        const auto rates = sim.sample_rates(seq.segments, grid);
                        curve.traces.insert(curve.traces.end(), rates.begin(), rates.end());
                    }
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    const int n_threads =
        std::max(1, std::min<int>(config.threads, static_cast<int>(members.size())));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    // weighted reduction in member order: independent of scheduling
    SweepResult result;
    result.kind = config.kind;
    result.sweep_label = sweep_label_for(config.kind);
    result.signal_cps.assign(n_points, 0.0);
    std::vector<double> trace_acc;
    if (want_traces) trace_acc.assign(n_points * trace_points, 0.0);
    for (std::size_t m = 0; m < members.size(); ++m) {
        for (std::size_t i = 0; i < n_points; ++i)
            result.signal_cps[i] += members[m].weight * curves[m].signal[i];
        if (want_traces)
            for (std::size_t i = 0; i < trace_acc.size(); ++i)
                trace_acc[i] += members[m].weight * curves[m].traces[i];
    }

    result.sweep.reserve(n_points);
    for (const PulseSequence& seq : sequences) result.sweep.push_back(seq.sweep_value);

    const double window =
        config.kind == ProtocolKind::cw_odmr ? 1.0 : plan.readout_width_s;
    for (std::size_t i = 0; i < n_points; ++i) {
        const double counts = result.signal_cps[i] * window;
        result.counts_per_shot.push_back(counts);
        result.shot_noise_std.push_back(std::sqrt(std::max(counts, 0.0)));
    }
    if (config.noise.poisson) {
        const uint64_t seed = config.seed_or_throw();
        for (std::size_t i = 0; i < n_points; ++i) {
            Rng rng(mix_seed(seed, i));
            const double total = result.counts_per_shot[i] * config.noise.shots;
            result.noisy_counts_per_shot.push_back(
                static_cast<double>(rng.poisson(total)) / config.noise.shots);
        }
    }
    if (want_traces) {
        for (std::size_t i = 0; i < n_points; ++i) {
            Trace tr;
            tr.x_label = "time_s";
            tr.y_label = "rate_cps";
            tr.x = trace_grid(sequences[i], trace_points);
            tr.y.assign(trace_acc.begin() + i * trace_points,
                        trace_acc.begin() + (i + 1) * trace_points);
            result.traces.push_back(std::move(tr));
        }
    }
    return result;
}

std::vector<std::string> write_sweep_outputs(const RunConfig& config, const SweepResult& result,
                                             const std::string& dir) {
    fs::create_directories(dir);
    std::vector<std::string> files;

    std::vector<std::string> header = {result.sweep_label, "signal_cps", "counts_per_shot",
                                       "shot_noise_std_counts"};
    std::vector<std::vector<double>> cols = {result.sweep, result.signal_cps,
                                             result.counts_per_shot, result.shot_noise_std};
    if (!result.noisy_counts_per_shot.empty()) {
        header.push_back("noisy_counts_per_shot");
        cols.push_back(result.noisy_counts_per_shot);
    }
    write_csv(dir + "/sweep.csv", header, cols);
    files.push_back("sweep.csv");

    {
        std::ofstream gp(dir + "/plot.gp", std::ios::binary);
        gp << "set datafile separator ','\n";
        gp << "set key autotitle columnhead\n";
        gp << "set xlabel '" << result.sweep_label << "'\n";
        gp << "set ylabel 'signal_cps'\n";
        gp << "plot 'sweep.csv' using 1:2 with linespoints\n";
        files.push_back("plot.gp");
    }
    {
        std::ofstream echo(dir + "/config_echo.json", std::ios::binary);
        echo << to_json(config).dump(2) << "\n";
        files.push_back("config_echo.json");
    }
    for (std::size_t i = 0; i < result.traces.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof(name), "trace_%04zu.csv", i);
        write_trace_csv(dir + "/" + name, result.traces[i]);
        files.push_back(name);
    }
    return files;
}

}  // namespace sicmag
