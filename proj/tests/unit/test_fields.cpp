#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "qnmq/qnmq.hpp"

using namespace qnmq;

namespace {

FieldGrid uniform_grid(Region region, std::size_t n, std::size_t modes, cplx eps, cplx field, double area) {
    FieldGrid g;
    g.region = region;
    for (std::size_t p = 0; p < n; ++p) {
        g.x_nm.push_back(static_cast<double>(p));
        g.y_nm.push_back(0.0);
        g.area_nm2.push_back(area);
        g.eps.push_back(eps);
    }
    g.fields.assign(modes, std::vector<cplx>(n, field));
    return g;
}

FieldGrid random_grid(oracle::Rng& rng, Region region, std::size_t n, std::size_t modes) {
    FieldGrid g;
    g.region = region;
    double sign = region == Region::loss_volume ? 1.0 : -1.0;
    for (std::size_t p = 0; p < n; ++p) {
        g.x_nm.push_back(rng.uniform(-500, 500));
        g.y_nm.push_back(rng.uniform(-500, 500));
        g.area_nm2.push_back(rng.uniform(0.5, 2.0));
        g.eps.emplace_back(4.0, sign * rng.uniform(1e-6, 1e-4));
    }
    for (std::size_t k = 0; k < modes; ++k) {
        std::vector<cplx> f;
        for (std::size_t p = 0; p < n; ++p) f.push_back(rng.cnormal());
        g.fields.push_back(f);
    }
    return g;
}

FieldGrid subgrid(const FieldGrid& g, std::size_t b, std::size_t e) {
    FieldGrid s;
    s.region = g.region;
    s.x_nm.assign(g.x_nm.begin() + b, g.x_nm.begin() + e);
    s.y_nm.assign(g.y_nm.begin() + b, g.y_nm.begin() + e);
    s.area_nm2.assign(g.area_nm2.begin() + b, g.area_nm2.begin() + e);
    s.eps.assign(g.eps.begin() + b, g.eps.begin() + e);
    for (const auto& f : g.fields) s.fields.emplace_back(f.begin() + b, f.begin() + e);
    return s;
}

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::ConfigError;  // sentinel: nothing thrown
}

const char* kHeader = "x_nm,y_nm,area_nm2,eps_re,eps_im,f0_re,f0_im,f1_re,f1_im\n";

}  // namespace

TEST(OverlapNrad, ZeroImaginaryPermittivityGivesZero) {
    auto g = uniform_grid(Region::loss_volume, 10, 2, cplx(4.0, 0.0), cplx(1.0, 2.0), 1.0);
    EXPECT_EQ(overlap_nrad_pole(g, 0, 1), cplx(0.0));
}

TEST(OverlapNrad, ConstantFieldQuadrature) {
    auto g = uniform_grid(Region::loss_volume, 7, 1, cplx(4.0, 1e-3), cplx(0.3, -0.4), 2.5);
    cplx v = overlap_nrad_pole(g, 0, 0);
    EXPECT_NEAR(v.real(), 1e-3 * 0.25 * 7 * 2.5, 1e-18);
    EXPECT_EQ(v.imag(), 0.0);
}

TEST(OverlapNrad, TwoPointWeightedSum) {
    FieldGrid g;
    g.region = Region::loss_volume;
    g.x_nm = {0, 1};
    g.y_nm = {0, 0};
    g.area_nm2 = {1.5, 0.25};
    g.eps = {cplx(4, 0.01), cplx(4, 0.04)};
    g.fields = {{cplx(1, 1), cplx(2, 0)}, {cplx(0, 1), cplx(1, -1)}};
    // 1.5*0.01*(1+i)(-i) + 0.25*0.04*2*(1+i)
    cplx expect = 1.5 * 0.01 * cplx(1, 1) * cplx(0, -1) + 0.25 * 0.04 * 2.0 * cplx(1, 1);
    EXPECT_LT(std::abs(overlap_nrad_pole(g, 0, 1) - expect), 1e-17);
}

TEST(OverlapNrad, PerModePermittivityUsesSymmetricProduct) {
    FieldGrid g = uniform_grid(Region::loss_volume, 1, 2, cplx(4.0, 1e-3), cplx(1.0, 0.0), 1.0);
    g.eps_mode = {{cplx(4.0, 4e-3)}, {cplx(4.0, 1e-2)}};
    validate_field_grid(g);
    EXPECT_NEAR(overlap_nrad_pole(g, 0, 1).real(), std::sqrt(4e-3 * 1e-2), 1e-18);
}

TEST(OverlapNrad, WrongRegionRaises) {
    auto g = uniform_grid(Region::gain_volume, 3, 1, cplx(4.0, -1e-3), 1.0, 1.0);
    EXPECT_EQ(kind_of([&] { overlap_nrad_pole(g, 0, 0); }), ErrorKind::RegionMismatch);
}

TEST(OverlapGain, ZeroImaginaryPermittivityGivesZero) {
    auto g = uniform_grid(Region::gain_volume, 4, 2, cplx(4.0, -0.0), cplx(1.0, 2.0), 1.0);
    EXPECT_EQ(overlap_gain_pole(g, 1, 0), cplx(0.0));
}

TEST(OverlapGain, DiagonalRealNonnegativeAndSwapConjugates) {
    oracle::Rng rng(21);
    auto g = random_grid(rng, Region::gain_volume, 50, 2);
    cplx d = overlap_gain_pole(g, 1, 1);
    EXPECT_EQ(d.imag(), 0.0);
    EXPECT_GE(d.real(), 0.0);
    EXPECT_EQ(overlap_gain_pole(g, 0, 1), std::conj(overlap_gain_pole(g, 1, 0)));
}

TEST(OverlapGain, ConjugationReversedRelativeToLoss) {
    FieldGrid g;
    g.region = Region::gain_volume;
    g.x_nm = {0};
    g.y_nm = {0};
    g.area_nm2 = {1.0};
    g.eps = {cplx(4, -0.01)};
    g.fields = {{cplx(1, 1)}, {cplx(0, 1)}};
    // conj(f0) f1 = (1 - i)(i) = 1 + i
    EXPECT_LT(std::abs(overlap_gain_pole(g, 0, 1) - 0.01 * cplx(1, 1)), 1e-17);
    EXPECT_EQ(kind_of([&] { overlap_gain_pole(uniform_grid(Region::loss_volume, 1, 1, 4.0, 1.0, 1.0), 0, 0); }),
              ErrorKind::RegionMismatch);
}

TEST(OverlapMatrix, HermitianWithNonnegativeDiagonalOnRandomGrids) {
    oracle::Rng rng(22);
    for (Region r : {Region::loss_volume, Region::gain_volume}) {
        for (int trial = 0; trial < 10; ++trial) {
            auto g = random_grid(rng, r, 300, 3);
            CMatrix m = overlap_matrix(g);
            for (int i = 0; i < 3; ++i) {
                EXPECT_EQ(m(i, i).imag(), 0.0);
                EXPECT_GE(m(i, i).real(), 0.0);
                for (int j = 0; j < 3; ++j) EXPECT_EQ(m(j, i), std::conj(m(i, j)));
            }
        }
    }
}

TEST(OverlapMatrix, SplittingIsLinear) {
    oracle::Rng rng(23);
    auto g = random_grid(rng, Region::loss_volume, 1000, 2);
    CMatrix whole = overlap_matrix(g);
    CMatrix parts = overlap_matrix(subgrid(g, 0, 377)) + overlap_matrix(subgrid(g, 377, 1000));
    EXPECT_LT((whole - parts).cwiseAbs().maxCoeff(), 1e-14 * whole.cwiseAbs().maxCoeff());
}

TEST(OverlapMatrix, BadModeIndexRaises) {
    auto g = uniform_grid(Region::loss_volume, 2, 1, cplx(4.0, 1e-3), 1.0, 1.0);
    EXPECT_EQ(kind_of([&] { overlap_nrad_pole(g, 0, 3); }), ErrorKind::DimensionMismatch);
}

TEST(NormalizationResidual, NormalizedScaledAndTruncated) {
    // eps * f^2 * total area = 1
    const double area = 0.5;
    const std::size_t n = 8;
    const cplx eps(4.0, 0.0);
    cplx f = std::sqrt(1.0 / (eps * area * static_cast<double>(n)));
    auto g = uniform_grid(Region::loss_volume, n, 1, eps, f, area);
    EXPECT_LT(std::abs(normalization_residual(g, 0)), 1e-15);
    for (auto& v : g.fields[0]) v *= 2.0;
    EXPECT_LT(std::abs(normalization_residual(g, 0) - 3.0), 1e-14);

    // Gaussian f(x) = (2/pi)^{1/4} exp(-x^2) normalized on the line; truncated at |x| <= 1.5
    FieldGrid t;
    t.region = Region::loss_volume;
    const double h = 1e-3;
    for (int i = -1500; i <= 1500; ++i) {
        t.x_nm.push_back(i * h);
        t.y_nm.push_back(0.0);
        t.area_nm2.push_back(h);
        t.eps.emplace_back(1.0, 0.0);
    }
    t.fields.emplace_back();
    for (double x : t.x_nm) t.fields[0].emplace_back(std::pow(2.0 / M_PI, 0.25) * std::exp(-x * x), 0.0);
    cplx r = normalization_residual(t, 0);
    EXPECT_LT(r.real(), 0.0);
    EXPECT_GT(r.real(), -0.01);
    // missing tails: -erfc(1.5 sqrt 2) ~ -2.7e-3; endpoint quadrature error ~ h f(1.5)^2 ~ 9e-6
    EXPECT_NEAR(r.real(), -std::erfc(1.5 * std::sqrt(2.0)), 2e-5);
}

TEST(ParseFieldGrid, WellFormedThreeRows) {
    std::istringstream in(std::string(kHeader) +
                          "0,0,1.0,4.0,1e-5,1,0,0,1\n"
                          "1,0,1.0,4.0,1e-5,0.5,0.5,0,1\n"
                          "2,0,2.0,4.0,2e-5,0.1,0,1,0\n");
    FieldGrid g = parse_field_grid(in, Region::loss_volume);
    EXPECT_EQ(g.point_count(), 3u);
    EXPECT_EQ(g.mode_count(), 2u);
    EXPECT_EQ(g.fields[0][1], cplx(0.5, 0.5));
    EXPECT_EQ(g.eps[2], cplx(4.0, 2e-5));
}

TEST(ParseFieldGrid, NonpositiveWeightNamesRow) {
    std::istringstream in(std::string(kHeader) +
                          "0,0,1.0,4.0,1e-5,1,0,0,1\n"
                          "1,0,0.0,4.0,1e-5,1,0,0,1\n");
    try {
        parse_field_grid(in, Region::loss_volume);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ValidationError);
        EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
    }
}

TEST(ParseFieldGrid, GainRegionWithPositiveImaginaryPermittivity) {
    std::istringstream in("# region=gain_volume\n" + std::string(kHeader) +
                          "0,0,1.0,4.0,-1e-5,1,0,0,1\n"
                          "1,0,1.0,4.0,1e-5,1,0,0,1\n");
    try {
        parse_field_grid(in, Region::loss_volume);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ValidationError);
        EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos);
    }
}

TEST(ParseFieldGrid, RejectsNonFiniteAmplitude) {
    std::istringstream in(std::string(kHeader) + "0,0,1.0,4.0,1e-5,nan,0,0,1\n");
    EXPECT_EQ(kind_of([&] { parse_field_grid(in, Region::loss_volume); }), ErrorKind::ValidationError);
}

TEST(ParseFieldGrid, StructuralErrorsAreParseErrors) {
    std::istringstream missing("x_nm,y_nm,area_nm2,eps_re,f0_re,f0_im\n0,0,1,4,1,0\n");
    EXPECT_EQ(kind_of([&] { parse_field_grid(missing, Region::loss_volume); }), ErrorKind::ParseError);
    std::istringstream short_row(std::string(kHeader) + "0,0,1.0,4.0\n");
    EXPECT_EQ(kind_of([&] { parse_field_grid(short_row, Region::loss_volume); }), ErrorKind::ParseError);
    std::istringstream bad_num(std::string(kHeader) + "0,0,abc,4.0,1e-5,1,0,0,1\n");
    EXPECT_EQ(kind_of([&] { parse_field_grid(bad_num, Region::loss_volume); }), ErrorKind::ParseError);
    std::istringstream empty("");
    EXPECT_EQ(kind_of([&] { parse_field_grid(empty, Region::loss_volume); }), ErrorKind::ParseError);
    EXPECT_EQ(kind_of([&] { load_field_grid("/nonexistent/grid.csv", Region::loss_volume); }), ErrorKind::ParseError);
}

TEST(ParseFieldGrid, PerModePermittivityColumns) {
    std::istringstream in(
        "x_nm,y_nm,area_nm2,eps_re,eps_im,f0_re,f0_im,eps0_re,eps0_im\n"
        "0,0,1,4,1e-5,1,0,4,3e-5\n");
    FieldGrid g = parse_field_grid(in, Region::loss_volume);
    ASSERT_EQ(g.eps_mode.size(), 1u);
    EXPECT_EQ(g.eps_imag(0, 0), 3e-5);
}
