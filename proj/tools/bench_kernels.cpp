// Benchmarks the OpenMP kernels against their serial references and verifies
// that both produce identical results.
//
//   bench_kernels [threads] [t_rows]

#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <iostream>

#include "netmom/bootstrap.hpp"
#include "netmom/experiment.hpp"
#include "netmom/leadlag.hpp"
#include "netmom/parallel.hpp"
#include "netmom/synthetic.hpp"

using namespace netmom;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(const std::string& name, double serial_s, double parallel_s,
            bool identical) {
    std::cout << std::left << std::setw(28) << name << std::right
              << std::setw(10) << std::fixed << std::setprecision(3) << serial_s
              << " s" << std::setw(10) << parallel_s << " s" << std::setw(8)
              << std::setprecision(2) << (serial_s / parallel_s) << "x  "
              << (identical ? "identical" : "MISMATCH") << "\n";
    if (!identical) std::exit(1);
}

}  // namespace

int main(int argc, char** argv) {
    const int threads = argc > 1 ? std::atoi(argv[1]) : hardware_threads();
    const int t_rows = argc > 2 ? std::atoi(argv[2]) : 700;
    std::cout << "threads=" << threads << " rows=" << t_rows << "\n";
    std::cout << std::left << std::setw(28) << "kernel" << std::right
              << std::setw(12) << "serial" << std::setw(12) << "parallel"
              << std::setw(8) << "speedup" << "\n";

    PricePanel panel = spillover_panel(t_rows, SpilloverSpec{}, 2024);
    const int t_last = panel.rows() - 1;

    {  // pairwise DTW lead-lag matrix
        auto s0 = Clock::now();
        LeadLagMatrix serial;
        for (int rep = 0; rep < 10; ++rep)
            serial = leadlag_matrix_serial(panel, t_last, 132, LeadLagMethod::Dtw);
        const double ts = seconds_since(s0);
        auto p0 = Clock::now();
        LeadLagMatrix par;
        for (int rep = 0; rep < 10; ++rep)
            par = leadlag_matrix(panel, t_last, 132, LeadLagMethod::Dtw, 11,
                                 threads);
        const double tp = seconds_since(p0);
        report("leadlag pairs (DTW)", ts, tp, par.values == serial.values);
    }

    {  // per-date network batch (lead-lag + graph solve per date)
        ModelSpec model = parse_model("NMM-LEVY", 132, defaults::delta_grid(), 11);
        PortfolioConfig pc;
        GraphHyperParams gp;
        const int begin = auto_eval_begin(panel, {model});
        auto s0 = Clock::now();
        ModelRun serial = run_model(panel, model, pc, gp, begin, panel.rows(), 1);
        const double ts = seconds_since(s0);
        auto p0 = Clock::now();
        ModelRun par =
            run_model(panel, model, pc, gp, begin, panel.rows(), threads);
        const double tp = seconds_since(p0);
        report("network dates (LEVY)", ts, tp,
               par.positions == serial.positions);
    }

    {  // bootstrap resample loop
        ExperimentConfig cfg;
        cfg.zoo = {"MACD", "NMM-LEVY"};
        cfg.bootstrap.n_resamples = 6;
        cfg.bootstrap.seed = 7;
        auto s0 = Clock::now();
        ExperimentReport serial = run_experiment(panel, cfg, 1);
        const double ts = seconds_since(s0);
        auto p0 = Clock::now();
        ExperimentReport par = run_experiment(panel, cfg, threads);
        const double tp = seconds_since(p0);
        report("experiment resamples", ts, tp,
               experiment_json(serial).dump() == experiment_json(par).dump());
    }
    return 0;
}
