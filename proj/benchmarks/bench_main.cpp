#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "resfault/forest.hpp"
#include "resfault/importance.hpp"
#include "resfault/ngram.hpp"
#include "resfault/normalize.hpp"
#include "resfault/product_metrics.hpp"
#include "resfault/representation.hpp"

namespace {

using namespace resfault;

std::string sample_module(int n_funcs) {
    std::string src;
    for (int f = 0; f < n_funcs; ++f) {
        src += "def fn" + std::to_string(f) + "(a, b):\n";
        src += "    total = 0\n";
        src += "    for i in range(a):\n";
        src += "        if i > b:\n";
        src += "            total += i * 3  # weight\n";
        src += "        else:\n";
        src += "            total -= i\n";
        src += "    return total\n\n";
    }
    return src;
}

void BM_parse_source(benchmark::State& state) {
    std::string src = sample_module(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto pr = py::parse_source(src);
        benchmark::DoNotOptimize(pr.root.children.size());
    }
}
BENCHMARK(BM_parse_source)->Arg(8)->Arg(64);

void BM_method_metrics(benchmark::State& state) {
    std::string src = sample_module(1);
    auto pr = py::parse_source(src);
    const py::SyntaxUnit* unit = py::find_unit(pr.root, py::UnitKind::Method, "fn0");
    for (auto _ : state) {
        MethodMetrics m = method_metrics(*unit);
        benchmark::DoNotOptimize(m.hvol);
    }
}
BENCHMARK(BM_method_metrics);

void BM_normalize_code(benchmark::State& state) {
    std::string src = sample_module(4);
    for (auto _ : state) {
        NormalizeResult r = normalize_code(src);
        benchmark::DoNotOptimize(r.text.size());
    }
}
BENCHMARK(BM_normalize_code);

void make_blobs(std::size_t n, std::size_t d, Matrix* x, std::vector<double>* y) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> noise(0.0, 1.0);
    *x = Matrix(n, d);
    y->assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        int label = static_cast<int>(rng() % 2);
        (*y)[i] = label;
        for (std::size_t c = 0; c < d; ++c) (*x)(i, c) = (label ? 1.5 : -1.5) + noise(rng);
    }
}

void BM_train_forest(benchmark::State& state) {
    Matrix x;
    std::vector<double> y;
    make_blobs(static_cast<std::size_t>(state.range(0)), 10, &x, &y);
    std::vector<std::string> schema(10, "f");
    ForestConfig cfg;
    cfg.n_trees = 20;
    cfg.seed = 3;
    for (auto _ : state) {
        ForestModel m = train_random_forest(x, y, schema, cfg);
        benchmark::DoNotOptimize(m.trees.size());
    }
}
BENCHMARK(BM_train_forest)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_shapley_mc(benchmark::State& state) {
    Matrix x;
    std::vector<double> y;
    make_blobs(300, 8, &x, &y);
    std::vector<std::string> schema(8, "f");
    ForestConfig cfg;
    cfg.n_trees = 10;
    cfg.max_depth = 3;
    cfg.seed = 5;
    ForestModel model = train_random_forest(x, y, schema, cfg);
    PredictFn f = [&](std::span<const double> row) { return model.predict_proba(row); };
    Matrix background(8, 8);
    for (std::size_t r = 0; r < 8; ++r)
        for (std::size_t c = 0; c < 8; ++c) background(r, c) = x(r, c);
    std::span<const double> point(&x.data()[0], 8);
    for (auto _ : state) {
        auto phi = shapley_mc(f, point, background, static_cast<int>(state.range(0)), 7);
        benchmark::DoNotOptimize(phi[0]);
    }
}
BENCHMARK(BM_shapley_mc)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_pca_fit(benchmark::State& state) {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> noise(0.0, 1.0);
    Matrix x(512, static_cast<std::size_t>(state.range(0)));
    for (auto& v : x.data()) v = noise(rng);
    for (auto _ : state) {
        ComponentSpace space = pca_fit(x, 0.95);
        benchmark::DoNotOptimize(space.variance_retained);
    }
}
BENCHMARK(BM_pca_fit)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_ngram_score(benchmark::State& state) {
    std::vector<std::vector<std::string>> corpus;
    std::mt19937_64 rng(2);
    const char* alphabet[] = {"a", "b", "c", "d", "e", "f", "g", "h"};
    for (int d = 0; d < 50; ++d) {
        std::vector<std::string> doc;
        for (int i = 0; i < 200; ++i) doc.push_back(alphabet[rng() % 8]);
        corpus.push_back(std::move(doc));
    }
    NgramModel m = NgramModel::train(corpus, 3, 0.01);
    std::vector<std::string> query;
    for (int i = 0; i < 100; ++i) query.push_back(alphabet[rng() % 8]);
    for (auto _ : state) {
        benchmark::DoNotOptimize(m.cross_entropy(query));
    }
}
BENCHMARK(BM_ngram_score);

}  // namespace

BENCHMARK_MAIN();
