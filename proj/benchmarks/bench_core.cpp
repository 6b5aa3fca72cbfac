#include <benchmark/benchmark.h>

#include "dislo/audit.hpp"
#include "dislo/elastic.hpp"
#include "dislo/energy.hpp"
#include "dislo/relax.hpp"
#include "dislo/topology.hpp"

using namespace dislo;

static void BM_BuildDomain(benchmark::State& state) {
    const double radius = static_cast<double>(state.range(0));
    for (auto _ : state) {
        LatticeDomain dom = LatticeDomain::disk(radius);
        benchmark::DoNotOptimize(dom.bond_count());
    }
}
BENCHMARK(BM_BuildDomain)->Arg(20)->Arg(40)->Arg(80);

static void BM_ReferenceStrain(benchmark::State& state) {
    const LatticeDomain dom = LatticeDomain::disk(static_cast<double>(state.range(0)));
    for (auto _ : state) {
        ReferenceField ref = ReferenceField::dislocation(dom);
        benchmark::DoNotOptimize(ref.alpha_hat().norm_inf());
    }
}
BENCHMARK(BM_ReferenceStrain)->Arg(20)->Arg(40)->Arg(80);

static void BM_EnergyAndGradient(benchmark::State& state) {
    const LatticeDomain dom = LatticeDomain::disk(static_cast<double>(state.range(0)));
    const PsiLin pot(1.0);
    const ReferenceField ref = ReferenceField::dislocation(dom);
    const EnergyState es(dom, pot, ref, dom.radius() - 2.0);
    Displacement u(dom);
    for (int s = 0; s < dom.site_count(); ++s) {
        u[s] = es.site_active(s) ? 0.01 * ((s * 2654435761u) % 97) / 97.0 : 0.0;
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(es.extended_energy(u));
        Displacement g = es.gradient(u);
        benchmark::DoNotOptimize(g[0]);
    }
}
BENCHMARK(BM_EnergyAndGradient)->Arg(20)->Arg(40);

static void BM_HopDistances(benchmark::State& state) {
    const LatticeDomain dom = LatticeDomain::disk(30.0);
    int c = dom.origin_cell();
    for (auto _ : state) {
        // fresh source each round to defeat the memo
        c = (c + 37) % dom.cell_count();
        benchmark::DoNotOptimize(dom.hop_distances(c).size());
    }
}
BENCHMARK(BM_HopDistances);

static void BM_DetectCores(benchmark::State& state) {
    const LatticeDomain dom = LatticeDomain::disk(30.0);
    const ReferenceField ref = ReferenceField::dislocation(dom);
    for (auto _ : state) {
        CoreSet cores = detect_cores(ref.alpha_hat());
        benchmark::DoNotOptimize(cores.count());
    }
}
BENCHMARK(BM_DetectCores);

static void BM_RelaxSingleCore(benchmark::State& state) {
    const LatticeDomain dom = LatticeDomain::disk(static_cast<double>(state.range(0)));
    const PsiLin pot(1.0);
    const ReferenceField ref = ReferenceField::dislocation(dom);
    const EnergyState es(dom, pot, ref, dom.radius() - 2.0);
    RelaxConfig cfg;
    cfg.tolerance = 1e-8;
    cfg.use_cg = true;
    for (auto _ : state) {
        RelaxResult rr = relax(es, es.zero(), cfg);
        benchmark::DoNotOptimize(rr.energy);
    }
}
BENCHMARK(BM_RelaxSingleCore)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

static void BM_MinimalConnection(benchmark::State& state) {
    const LatticeDomain dom = LatticeDomain::disk(24.0);
    CoreSet cores;
    for (int k = 0; k < 4; ++k) {
        cores.positive.push_back(dom.find_cell(-6 + 3 * k, 2, CellOrient::Ref));
        cores.negative.push_back(dom.find_cell(-5 + 3 * k, -3, CellOrient::Anti));
    }
    for (auto _ : state) {
        MinimalConnection mc = minimal_connection(dom, cores);
        benchmark::DoNotOptimize(mc.total_length);
    }
}
BENCHMARK(BM_MinimalConnection);

BENCHMARK_MAIN();
