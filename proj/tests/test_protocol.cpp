#include <doctest.h>

#include <cmath>

#include "sicmag/constants.hpp"
#include "sicmag/protocol.hpp"

using namespace sicmag;

namespace {

SweepPlan base_plan() {
    SweepPlan p;
    p.b1_t = 3.5e-4;
    p.f_drive_hz = 70e6;
    p.gamma_hz_per_t = PhysicalConstants{}.gamma_hz_per_t();
    return p;
}

}  // namespace

TEST_SUITE("protocol") {

TEST_CASE("pi pulse duration") {
    const double gamma = 28.024e9;

    SUBCASE("doubling B1 halves t_pi") {
        const double t1 = pi_pulse_duration(1e-4, gamma);
        const double t2 = pi_pulse_duration(2e-4, gamma);
        CHECK(t1 == doctest::Approx(2.0 * t2).epsilon(1e-12));
    }

    SUBCASE("microstrip example: 41.9 uT gives about 492 ns") {
        const double b1 = 41.888e-6;  // mu0 * 200 mA / (2 * 3 mm)
        const double omega_r = std::sqrt(3.0) / 2.0 * gamma * b1;
        CHECK(omega_r == doctest::Approx(1.017e6).epsilon(2e-3));
        CHECK(pi_pulse_duration(b1, gamma) == doctest::Approx(492e-9).epsilon(2e-3));
    }

    SUBCASE("t_pi times Omega_R is exactly one half") {
        for (double b1 : {1e-5, 7e-5, 4e-4}) {
            const double omega_r = std::sqrt(3.0) / 2.0 * gamma * b1;
            CHECK(pi_pulse_duration(b1, gamma) * omega_r == doctest::Approx(0.5).epsilon(1e-13));
        }
    }

    CHECK_THROWS_AS((void)pi_pulse_duration(0.0, gamma), std::invalid_argument);
}

TEST_CASE("t1 protocol structure") {
    SweepPlan p = base_plan();
    p.b1_t = 0.0;  // no RF in a T1 sequence
    p.sweep = {1e-6, 10e-6, 100e-6};
    const auto seqs = make_protocol(ProtocolKind::t1, p);
    REQUIRE(seqs.size() == 3);
    for (size_t i = 0; i < seqs.size(); ++i) {
        const PulseSequence& s = seqs[i];
        REQUIRE(s.segments.size() == 3);
        CHECK(s.segments[0].laser.on);
        CHECK(s.segments[0].duration_s == 12e-6);  // default t_I
        CHECK(!s.segments[1].laser.on);
        CHECK(!s.segments[1].rf.on);
        CHECK(s.segments[1].duration_s == p.sweep[i]);
        CHECK(s.segments[2].laser.on);
        // readout at the start of the second laser pulse
        CHECK(s.readout.segment_index == 2);
        CHECK(s.readout.offset_s == 0.0);
        CHECK(s.total_duration_s() ==
              doctest::Approx(12e-6 + p.sweep[i] + 12e-6).epsilon(1e-12));
    }
}

TEST_CASE("ramsey structure and the tau = 0 limit") {
    SweepPlan p = base_plan();
    p.detuning_hz = 5e6;
    p.sweep = {0.0, 100e-9, 400e-9};
    const auto seqs = make_protocol(ProtocolKind::ramsey, p);
    const double t_pi = p.pi_duration();

    for (const auto& s : seqs) {
        REQUIRE(s.segments.size() == 5);
        // both pi/2 pulses run at the detuned carrier
        CHECK(s.segments[1].rf.f_hz == doctest::Approx(75e6));
        CHECK(s.segments[3].rf.f_hz == doctest::Approx(75e6));
        CHECK(s.segments[1].duration_s == doctest::Approx(t_pi / 2.0));
    }
    // tau = 0: the two pi/2 pulses concatenate to one pi pulse of RF time
    double rf_time = 0.0;
    for (const auto& seg : seqs[0].segments)
        if (seg.rf.on) rf_time += seg.duration_s;
    CHECK(rf_time == doctest::Approx(t_pi).epsilon(1e-12));
    CHECK(seqs[0].segments[2].duration_s == 0.0);
}

TEST_CASE("hahn echo structure") {
    SweepPlan p = base_plan();
    p.sweep = {2e-6};
    const double t_pi = p.pi_duration();

    SUBCASE("total RF time is 2 t_pi and the duration decomposes") {
        const auto seqs = make_protocol(ProtocolKind::hahn_echo, p);
        REQUIRE(seqs.size() == 1);
        const PulseSequence& s = seqs[0];
        REQUIRE(s.segments.size() == 7);
        double rf_time = 0.0;
        for (const auto& seg : s.segments)
            if (seg.rf.on) rf_time += seg.duration_s;
        CHECK(rf_time == doctest::Approx(2.0 * t_pi).epsilon(1e-12));
        CHECK(s.total_duration_s() ==
              doctest::Approx(12e-6 + 2e-6 + 2.0 * t_pi + 12e-6).epsilon(1e-12));
        CHECK(s.segments[2].duration_s == doctest::Approx(1e-6));  // tau/2
        CHECK(s.segments[4].duration_s == doctest::Approx(1e-6));
    }

    SUBCASE("the y projection inverts the final pulse carrier") {
        p.final_phase = PulsePhase::x;
        const auto sx = make_protocol(ProtocolKind::hahn_echo, p);
        p.final_phase = PulsePhase::y;
        const auto sy = make_protocol(ProtocolKind::hahn_echo, p);
        CHECK(sx[0].segments[5].rf.phase_rad == 0.0);
        CHECK(sy[0].segments[5].rf.phase_rad == doctest::Approx(3.14159265).epsilon(1e-6));
    }
}

TEST_CASE("cw protocol is continuous with laser and RF") {
    SweepPlan p = base_plan();
    p.sweep = {60e6, 70e6, 80e6};
    const auto seqs = make_protocol(ProtocolKind::cw_odmr, p);
    for (size_t i = 0; i < seqs.size(); ++i) {
        CHECK(seqs[i].continuous);
        CHECK(seqs[i].segments.front().laser.on);
        CHECK(seqs[i].segments.front().rf.on);
        CHECK(seqs[i].segments.front().rf.f_hz == p.sweep[i]);
    }
}

TEST_CASE("plan validation names the missing parameter") {
    SweepPlan p = base_plan();
    p.sweep = {1e-6, 2e-6};
    p.b1_t = 0.0;
    try {
        (void)make_protocol(ProtocolKind::rabi, p);
        FAIL("expected an exception");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("b1_t") != std::string::npos);
    }

    SweepPlan q = base_plan();
    q.sweep = {2e-6, 1e-6};  // not increasing
    CHECK_THROWS_AS((void)make_protocol(ProtocolKind::rabi, q), std::invalid_argument);
}

TEST_CASE("generated sequences satisfy their own invariants") {
    SweepPlan p = base_plan();
    p.sweep = {100e-9, 500e-9, 2e-6};
    p.detuning_hz = 3e6;
    for (auto kind : {ProtocolKind::rabi, ProtocolKind::ramsey, ProtocolKind::hahn_echo}) {
        for (const auto& s : make_protocol(kind, p)) {
            s.validate();
            CHECK(s.readout.segment_index == s.segments.size() - 1);
            CHECK(s.segments[s.readout.segment_index].laser.on);
        }
    }
}

TEST_CASE("lock-in wrapper") {
    SweepPlan p = base_plan();
    p.sweep = {1e-6};
    const PulseSequence seq = make_protocol(ProtocolKind::rabi, p)[0];
    const double seq_t = seq.total_duration_s();

    SUBCASE("low half carries no RF, high half matches the input") {
        const double f_mod = 1.0 / (2.0 * 5.0 * seq_t * 1.25);  // fits with padding
        const LockinPeriod lp = wrap_lockin(seq, 5, f_mod);
        CHECK(lp.n_repeat == 5);
        int rf_low = 0, rf_high = 0;
        for (const auto& s : lp.low_half) rf_low += s.rf.on ? 1 : 0;
        for (const auto& s : lp.high_half) rf_high += s.rf.on ? 1 : 0;
        CHECK(rf_low == 0);
        CHECK(rf_high == 5);

        double t_low = 0.0, t_high = 0.0;
        for (const auto& s : lp.low_half) t_low += s.duration_s;
        for (const auto& s : lp.high_half) t_high += s.duration_s;
        CHECK(t_low + t_high == doctest::Approx(1.0 / f_mod).epsilon(1e-9));
        CHECK(t_low == doctest::Approx(t_high).epsilon(1e-9));
    }

    SUBCASE("a half-period too short for the repetitions is rejected with the limit") {
        try {
            (void)wrap_lockin(seq, 5, 1.0 / (2.0 * 4.0 * seq_t));
            FAIL("expected an exception");
        } catch (const std::invalid_argument& e) {
            CHECK(std::string(e.what()).find("f_mod") != std::string::npos);
        }
    }
}

}  // TEST_SUITE
