#include <benchmark/benchmark.h>

#include <vector>

#include "greenxva/cds1d.hpp"
#include "greenxva/cds2d.hpp"
#include "greenxva/cds3d.hpp"
#include "greenxva/fem.hpp"
#include "greenxva/mc_oracle.hpp"
#include "greenxva/mesh.hpp"
#include "greenxva/specfun.hpp"

using namespace greenxva;

namespace {

constexpr double kX = 1.47, kY = 2.904, kZ = 1.903;

struct Case {
    domain3d::DomainSpec d;
    fem::EigenBasis basis;
};

const Case& octant() {
    static const Case c = [] {
        Case k{domain3d::build_domain({0.0, 0.0, 0.0}), {}};
        mesh::MeshOptions o;
        o.n_points = 1500;
        k.basis = fem::compute_basis(mesh::build_mesh(k.d, o), cds3d::kPricingTerms);
        return k;
    }();
    return c;
}

model::CdsTerms five_year() {
    model::CdsTerms t;
    t.maturity = 5.0;
    t.rate = 0.01;
    t.recovery_ps = 0.5;
    t.coupon = cds1d::breakeven_coupon_1d(5.0, kY, 0.01, 0.4);
    return t;
}

void BM_BesselIScaled(benchmark::State& s) {
    const double nu = static_cast<double>(s.range(0)) + 0.5;
    for (auto _ : s) benchmark::DoNotOptimize(specfun::bessel_i_scaled(nu, 37.0));
}
BENCHMARK(BM_BesselIScaled)->Arg(0)->Arg(10)->Arg(100);

void BM_Hyp1f1(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(specfun::hyp1f1(2.3, 6.1, -14.0));
}
BENCHMARK(BM_Hyp1f1);

void BM_BreakevenCoupon1d(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(cds1d::breakeven_coupon_1d(5.0, kY, 0.01, 0.4));
}
BENCHMARK(BM_BreakevenCoupon1d);

void BM_Survival2d(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(cds2d::survival_2d_1f1(5.0, kX, kY, 0.5));
}
BENCHMARK(BM_Survival2d);

void BM_Cva2d(benchmark::State& s) {
    const auto t = five_year();
    for (auto _ : s) benchmark::DoNotOptimize(cds2d::cva_2d(t, kX, kY, 0.5));
}
BENCHMARK(BM_Cva2d)->Unit(benchmark::kMillisecond);

void BM_BuildMesh(benchmark::State& s) {
    const auto d = domain3d::build_domain({0.8, 0.5, 0.3});
    mesh::MeshOptions o;
    o.n_points = static_cast<int>(s.range(0));
    for (auto _ : s) benchmark::DoNotOptimize(mesh::build_mesh(d, o));
}
BENCHMARK(BM_BuildMesh)->Arg(500)->Arg(1500)->Unit(benchmark::kMillisecond);

void BM_ComputeBasis(benchmark::State& s) {
    const auto d = domain3d::build_domain({0.0, 0.0, 0.0});
    mesh::MeshOptions o;
    o.n_points = 1500;
    const auto m = mesh::build_mesh(d, o);
    for (auto _ : s) benchmark::DoNotOptimize(fem::compute_basis(m, static_cast<int>(s.range(0))));
}
BENCHMARK(BM_ComputeBasis)->Arg(50)->Arg(400)->Unit(benchmark::kMillisecond)->Iterations(1);

void BM_Survival3d(benchmark::State& s) {
    const auto& c = octant();
    const cds3d::Green3d g(c.d, c.basis, cds3d::transform_3d(c.d, kX, kY, kZ), 50);
    for (auto _ : s) benchmark::DoNotOptimize(cds3d::survival_3d(5.0, g));
}
BENCHMARK(BM_Survival3d);

void BM_BreakevenSet3d(benchmark::State& s) {
    const auto& c = octant();
    const cds3d::Green3d g(c.d, c.basis, cds3d::transform_3d(c.d, kX, kY, kZ), cds3d::kPricingTerms);
    const auto t = five_year();
    for (auto _ : s) benchmark::DoNotOptimize(cds3d::breakeven_coupons_3d(t, g));
}
BENCHMARK(BM_BreakevenSet3d)->Unit(benchmark::kMillisecond);

void BM_McSurvival3d(benchmark::State& s) {
    mc::McConfig cfg;
    cfg.n_paths = 10000;
    const std::vector<double> x0s{kX, kY, kZ};
    for (auto _ : s) benchmark::DoNotOptimize(mc::simulate_survival(3, x0s, {0.8, 0.5, 0.3}, 5.0, cfg));
}
BENCHMARK(BM_McSurvival3d)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
