#include <array>
#include <cmath>
#include <random>

#include <doctest.h>

#include "qhnn/quaternion.hpp"

using namespace qhnn;

namespace {

constexpr double kPi = 3.14159265358979323846;

Quaternion random_quaternion(std::mt19937_64& rng, double scale = 4.0) {
    std::uniform_real_distribution<double> d(-scale, scale);
    return {d(rng), d(rng), d(rng), d(rng)};
}

PhaseTriple random_in_range_triple(std::mt19937_64& rng, double psi_margin = 1e-3) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double phi = -kPi + u(rng) * 2.0 * kPi * (1.0 - 1e-12);
    const double psi = (-kPi / 4.0 + psi_margin) + u(rng) * (kPi / 2.0 - 2.0 * psi_margin);
    const double theta = -kPi / 2.0 + u(rng) * kPi * (1.0 - 1e-12);
    return {phi, psi, theta};
}

// Independent oracle: the phase-angle product expanded to component formulas
// by hand (cos/sin abbreviations per factor).
Quaternion phase_angles_by_expansion(const PhaseTriple& p, double magnitude) {
    const double cp = std::cos(p.phi), sp = std::sin(p.phi);
    const double cs = std::cos(p.psi), ss = std::sin(p.psi);
    const double ct = std::cos(p.theta), st = std::sin(p.theta);
    return magnitude * Quaternion{cp * cs * ct + sp * ss * st, sp * cs * ct - cp * ss * st,
                                  cp * cs * st - sp * ss * ct, sp * cs * st + cp * ss * ct};
}

double ulps_of(double reference) { return std::abs(reference) * 2.2e-16; }

}  // namespace

TEST_CASE("hyper-imaginary unit products") {
    const Quaternion i = Quaternion::unit_i();
    const Quaternion j = Quaternion::unit_j();
    const Quaternion k = Quaternion::unit_k();

    CHECK(i * i == -Quaternion::one());
    CHECK(j * j == -Quaternion::one());
    CHECK(k * k == -Quaternion::one());
    CHECK(i * j == k);
    CHECK(j * k == i);
    CHECK(k * i == j);
    CHECK((i * j) * k == -Quaternion::one());
}

TEST_CASE("non-commutativity witness: ij = -ji") {
    CHECK(Quaternion::unit_i() * Quaternion::unit_j() ==
          -(Quaternion::unit_j() * Quaternion::unit_i()));
}

TEST_CASE("product matches printed activation potential") {
    const Quaternion p{5.0, 1.0, 7.0, 2.0};
    const Quaternion q{-0.2706, -0.6533, -0.2706, 0.6533};
    const Quaternion r = p * q;
    CHECK(std::abs(r.w - -0.1121) < 5e-4);
    CHECK(std::abs(r.x - 1.577) < 5e-4);
    CHECK(std::abs(r.y - -5.207) < 5e-4);
    CHECK(std::abs(r.z - 7.028) < 5e-4);
}

TEST_CASE("multiplicative identity") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 20; ++t) {
        const Quaternion q = random_quaternion(rng);
        CHECK(q * Quaternion::one() == q);
        CHECK(Quaternion::one() * q == q);
    }
}

TEST_CASE("conjugate flips the vector part and is an involution") {
    const Quaternion q{1.0, 2.0, 3.0, 4.0};
    CHECK(q.conjugate() == Quaternion{1.0, -2.0, -3.0, -4.0});

    std::mt19937_64 rng(11);
    for (int t = 0; t < 50; ++t) {
        const Quaternion r = random_quaternion(rng);
        CHECK(r.conjugate().conjugate() == r);
    }
}

TEST_CASE("norm basics") {
    CHECK(Quaternion::zero().norm() == 0.0);
    const Quaternion v{-0.1121, 1.577, -5.207, 7.028};
    CHECK(std::abs(v.norm() - 8.888) < 1e-3);
}

TEST_CASE("|pq| = |p||q| within 8 ulps") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 200; ++t) {
        const Quaternion p = random_quaternion(rng);
        const Quaternion q = random_quaternion(rng);
        const double lhs = (p * q).norm();
        const double rhs = p.norm() * q.norm();
        CHECK(std::abs(lhs - rhs) <= 8.0 * ulps_of(rhs) + 1e-300);
    }
}

TEST_CASE("associativity within 8 ulps per component") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 200; ++t) {
        const Quaternion p = random_quaternion(rng);
        const Quaternion q = random_quaternion(rng);
        const Quaternion r = random_quaternion(rng);
        const Quaternion a = (p * q) * r;
        const Quaternion b = p * (q * r);
        const double scale = p.norm() * q.norm() * r.norm();
        CHECK(std::abs(a.w - b.w) <= 8.0 * ulps_of(scale));
        CHECK(std::abs(a.x - b.x) <= 8.0 * ulps_of(scale));
        CHECK(std::abs(a.y - b.y) <= 8.0 * ulps_of(scale));
        CHECK(std::abs(a.z - b.z) <= 8.0 * ulps_of(scale));
    }
}

TEST_CASE("real_inner is the 4-D dot product") {
    CHECK(real_inner(Quaternion::unit_i(), Quaternion::unit_j()) == 0.0);

    std::mt19937_64 rng(19);
    for (int t = 0; t < 50; ++t) {
        const Quaternion p = random_quaternion(rng);
        const Quaternion q = random_quaternion(rng);

        // independent oracle: plain array dot product
        const std::array<double, 4> pa{p.w, p.x, p.y, p.z};
        const std::array<double, 4> qa{q.w, q.x, q.y, q.z};
        double dot = 0.0;
        for (int c = 0; c < 4; ++c) dot += pa[c] * qa[c];

        CHECK(real_inner(p, q) == dot);
        CHECK(real_inner(p, p) == doctest::Approx(p.norm_squared()));
        // Cauchy-Schwarz
        CHECK(real_inner(p, q) <= p.norm() * q.norm() + 4.0 * ulps_of(p.norm() * q.norm()));
    }
}

TEST_CASE("real_inner agrees with Re(conj(q) p)") {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 50; ++t) {
        const Quaternion p = random_quaternion(rng);
        const Quaternion q = random_quaternion(rng);
        CHECK(real_inner(p, q) == doctest::Approx((q.conjugate() * p).real()).epsilon(1e-12));
    }
}

TEST_CASE("from_phase_angles reproduces the printed initial state") {
    const Quaternion x0 = from_phase_angles({-kPi / 2.0, -kPi / 8.0, -kPi / 4.0});
    CHECK(std::abs(x0.w - -0.2706) < 5e-4);
    CHECK(std::abs(x0.x - -0.6533) < 5e-4);
    CHECK(std::abs(x0.y - -0.2706) < 5e-4);
    CHECK(std::abs(x0.z - 0.6533) < 5e-4);
}

TEST_CASE("from_phase_angles trivial and derived oracles") {
    CHECK(from_phase_angles({0.0, 0.0, 0.0}) == Quaternion::one());

    // frozen against the hand-expanded component formulas
    const Quaternion expanded = phase_angles_by_expansion({kPi / 2.0, kPi / 8.0, kPi / 4.0}, 1.0);
    const Quaternion built = from_phase_angles({kPi / 2.0, kPi / 8.0, kPi / 4.0});
    CHECK(std::abs(built.w - expanded.w) < 1e-15);
    CHECK(std::abs(built.x - expanded.x) < 1e-15);
    CHECK(std::abs(built.y - expanded.y) < 1e-15);
    CHECK(std::abs(built.z - expanded.z) < 1e-15);

    std::mt19937_64 rng(29);
    for (int t = 0; t < 500; ++t) {
        const PhaseTriple p = random_in_range_triple(rng, 0.0);
        std::uniform_real_distribution<double> mag(0.0, 10.0);
        const double m = mag(rng);
        const Quaternion a = from_phase_angles(p, m);
        const Quaternion b = phase_angles_by_expansion(p, m);
        CHECK(std::abs(a.w - b.w) < 1e-14 * (1.0 + m));
        CHECK(std::abs(a.x - b.x) < 1e-14 * (1.0 + m));
        CHECK(std::abs(a.y - b.y) < 1e-14 * (1.0 + m));
        CHECK(std::abs(a.z - b.z) < 1e-14 * (1.0 + m));
        CHECK(std::abs(a.norm() - m) <= 4.0 * ulps_of(m) + 1e-300);
    }
}

TEST_CASE("to_phase_angles recovers the printed potential phases") {
    const Quaternion v{-0.1121, 1.577, -5.207, 7.028};
    const PhaseExtraction e = to_phase_angles(v);
    REQUIRE(e.ok());
    CHECK(std::abs(e.angles.phi - 2.1939) < 5e-4);
    CHECK(std::abs(e.angles.psi - 0.09455) < 5e-4);
    CHECK(std::abs(e.angles.theta - 1.4181) < 5e-4);
}

TEST_CASE("to_phase_angles trivial cases and errors") {
    const PhaseExtraction one = to_phase_angles(Quaternion::one());
    REQUIRE(one.ok());
    CHECK(one.angles == PhaseTriple{0.0, 0.0, 0.0});

    CHECK(to_phase_angles(Quaternion::zero()).error == PhaseError::zero);

    // |psi| = pi/4 by construction
    const Quaternion locked = from_phase_angles({kPi / 3.0, kPi / 4.0, 0.0});
    CHECK(to_phase_angles(locked).error == PhaseError::gimbal_lock);
    CHECK_FALSE(is_phase_representable(locked));
    CHECK_FALSE(is_phase_representable(Quaternion::zero()));
    CHECK(is_phase_representable(Quaternion{-0.1121, 1.577, -5.207, 7.028}));
}

TEST_CASE("round trip: angles -> quaternion -> angles") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> mag(0.1, 10.0);
    for (int t = 0; t < 1000; ++t) {
        const PhaseTriple p = random_in_range_triple(rng);
        const double m = mag(rng);
        const Quaternion q = from_phase_angles(p, m);
        const PhaseExtraction e = to_phase_angles(q);
        REQUIRE(e.ok());
        CHECK(std::abs(e.angles.phi - p.phi) < 1e-12);
        CHECK(std::abs(e.angles.psi - p.psi) < 1e-12);
        CHECK(std::abs(e.angles.theta - p.theta) < 1e-12);
    }
}

TEST_CASE("round trip: quaternion -> angles -> quaternion within 1e-10") {
    std::mt19937_64 rng(37);
    int accepted = 0;
    for (int t = 0; t < 4000 && accepted < 1000; ++t) {
        const Quaternion q = random_quaternion(rng);
        const PhaseExtraction e = to_phase_angles(q);
        if (!e.ok()) continue;
        if (std::abs(e.angles.psi) > kPi / 4.0 - 1e-3) continue;
        ++accepted;
        const Quaternion back = from_phase_angles(e.angles, q.norm());
        CHECK(std::abs(back.w - q.w) < 1e-10);
        CHECK(std::abs(back.x - q.x) < 1e-10);
        CHECK(std::abs(back.y - q.y) < 1e-10);
        CHECK(std::abs(back.z - q.z) < 1e-10);
    }
    CHECK(accepted == 1000);
}

TEST_CASE("extracted angles respect their half-open ranges") {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 2000; ++t) {
        const PhaseExtraction e = to_phase_angles(random_quaternion(rng));
        if (!e.ok()) continue;
        CHECK(e.angles.phi >= -kPi);
        CHECK(e.angles.phi < kPi);
        CHECK(e.angles.psi >= -kPi / 4.0);
        CHECK(e.angles.psi <= kPi / 4.0);
        CHECK(e.angles.theta >= -kPi / 2.0);
        CHECK(e.angles.theta < kPi / 2.0);
    }
}

TEST_CASE("text rendering uses 4 significant digits") {
    CHECK(to_string({-0.11208, 1.57716, -5.20702, 7.02758}) ==
          "-0.1121+1.577i-5.207j+7.028k");
    CHECK(to_string(Quaternion::one()) == "1+0i+0j+0k");
}
