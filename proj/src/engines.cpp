#include "drsr/engines.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "drsr/metrics.hpp"
#include "drsr/simplify.hpp"

namespace drsr {

std::string method_name(Method m) {
    switch (m) {
    case Method::DRSR: return "drsr";
    case Method::SR: return "sr";
    case Method::MOSR: return "mosr";
    }
    return "?";
}

Method method_from_name(const std::string& name) {
    if (name == "drsr") return Method::DRSR;
    if (name == "sr") return Method::SR;
    if (name == "mosr") return Method::MOSR;
    throw std::invalid_argument("unknown method: " + name);
}

bool dominates_fitness_nodes(double fitness_a, int nodes_a, double fitness_b, int nodes_b) {
    return fitness_a >= fitness_b && nodes_a <= nodes_b &&
           (fitness_a > fitness_b || nodes_a < nodes_b);
}

std::vector<std::vector<int>> fast_non_dominated_sort(
    std::span<const std::pair<double, int>> objectives) {
    const int n = static_cast<int>(objectives.size());
    std::vector<std::vector<int>> dominated(static_cast<std::size_t>(n));
    std::vector<int> dominators(static_cast<std::size_t>(n), 0);
    std::vector<std::vector<int>> fronts(1);

    for (int p = 0; p < n; ++p) {
        for (int q = 0; q < n; ++q) {
            if (p == q) continue;
            const auto& [fp, np] = objectives[static_cast<std::size_t>(p)];
            const auto& [fq, nq] = objectives[static_cast<std::size_t>(q)];
            if (dominates_fitness_nodes(fp, np, fq, nq))
                dominated[static_cast<std::size_t>(p)].push_back(q);
            else if (dominates_fitness_nodes(fq, nq, fp, np))
                ++dominators[static_cast<std::size_t>(p)];
        }
        if (dominators[static_cast<std::size_t>(p)] == 0) fronts[0].push_back(p);
    }
    std::size_t i = 0;
    while (i < fronts.size() && !fronts[i].empty()) {
        std::vector<int> next;
        for (int p : fronts[i]) {
            for (int q : dominated[static_cast<std::size_t>(p)]) {
                if (--dominators[static_cast<std::size_t>(q)] == 0) next.push_back(q);
            }
        }
        ++i;
        if (!next.empty()) fronts.push_back(std::move(next));
    }
    return fronts;
}

std::vector<double> crowding_distances(std::span<const std::pair<double, int>> objectives,
                                       std::span<const int> front) {
    const std::size_t m = front.size();
    std::vector<double> dist(m, 0.0);
    if (m <= 2) {
        std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
        return dist;
    }
    std::vector<std::size_t> order(m);
    const auto by_objective = [&](auto value_of) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return value_of(front[a]) < value_of(front[b]);
        });
        const double lo = value_of(front[order.front()]);
        const double hi = value_of(front[order.back()]);
        dist[order.front()] = std::numeric_limits<double>::infinity();
        dist[order.back()] = std::numeric_limits<double>::infinity();
        if (hi <= lo) return;
        for (std::size_t k = 1; k + 1 < m; ++k)
            dist[order[k]] +=
                (value_of(front[order[k + 1]]) - value_of(front[order[k - 1]])) / (hi - lo);
    };
    by_objective([&](int idx) { return objectives[static_cast<std::size_t>(idx)].first; });
    by_objective([&](int idx) {
        return static_cast<double>(objectives[static_cast<std::size_t>(idx)].second);
    });
    return dist;
}

int tournament_select(std::span<const double> fitness, int size, Rng& rng) {
    int best = static_cast<int>(rng.uniform_index(fitness.size()));
    for (int i = 1; i < size; ++i) {
        const int c = static_cast<int>(rng.uniform_index(fitness.size()));
        if (fitness[static_cast<std::size_t>(c)] > fitness[static_cast<std::size_t>(best)]) best = c;
    }
    return best;
}

namespace {

struct SearchContext {
    const EngineConfig& cfg;
    const Dataset& ds;
    Dataset base_subset;
    Dataset linear_subset;
    Dataset logistic_subset;
    ClusterAssignment assignment;
    std::vector<std::vector<double>> probes;
    SimplifyOptions simplify_opts;
    EvalBudget budget;
    Rng search_rng;

    SearchContext(const EngineConfig& c, const Dataset& d)
        : cfg(c), ds(d), search_rng(derive_seed(c.seed, 4)) {
        if (c.budget == 0) throw std::invalid_argument("evaluation budget must be positive");
        if (c.population < 2) throw std::invalid_argument("population must be at least 2");
        assignment = cluster_dataset(ds, c.clusters, derive_seed(c.seed, 1));
        Rng probe_rng(derive_seed(c.seed, 2));
        probes = draw_probe_inputs(ds, c.probe_count, probe_rng);
        simplify_opts.limits = c.limits;
        budget.limit = c.budget;
        if (ds.has_label("base")) base_subset = ds.subset("base");
        if (ds.has_label("linear")) linear_subset = ds.subset("linear");
        if (ds.has_label("logistic")) logistic_subset = ds.subset("logistic");
    }

    ScoredEvaluation score(const ExpressionTree& tree) {
        const auto ev = evaluate_and_describe(tree, ds, cfg.loss, assignment, cfg.trans_cap);
        budget.consume();
        return ev;
    }

    // crossover + per-child mutation + simplification
    std::pair<ExpressionTree, ExpressionTree> vary(const ExpressionTree& p1,
                                                   const ExpressionTree& p2) {
        auto [c1, c2] = subtree_crossover(p1, p2, cfg.crossover_rate, cfg.limits, search_rng);
        auto finish = [&](ExpressionTree child) {
            child = subtree_mutation(child, ds.input_dim, cfg.mutation_rate, cfg.limits,
                                     search_rng);
            return simplify_expression(child, probes, simplify_opts);
        };
        return {finish(std::move(c1)), finish(std::move(c2))};
    }
};

// best-fitness entry wins; ties keep the earliest in iteration order
template <typename It, typename FitnessOf>
It argmax_fitness(It begin, It end, FitnessOf fitness_of) {
    It best = begin;
    for (It it = std::next(begin); it != end; ++it)
        if (fitness_of(*it) > fitness_of(*best)) best = it;
    return best;
}

TraceRow finish_trace_row(TraceRow row, const SearchContext& ctx, const Archive& archive,
                          const ExpressionTree* best_tree,
                          std::span<const std::pair<double, double>> hv_points,
                          const auto& for_each_tree) {
    row.coverage = coverage(archive);
    row.qd_score = qd_score(archive);
    row.hypervolume = hypervolume(hv_points);
    if (best_tree && ctx.base_subset.size() > 0)
        row.acc_base = subset_accuracy(*best_tree, ctx.base_subset);
    if (ctx.linear_subset.size() > 0 || ctx.logistic_subset.size() > 0) {
        double lin = 0.0, lgs = 0.0;
        for_each_tree([&](const ExpressionTree& t) {
            if (ctx.linear_subset.size() > 0)
                lin = std::max(lin, subset_accuracy(t, ctx.linear_subset));
            if (ctx.logistic_subset.size() > 0)
                lgs = std::max(lgs, subset_accuracy(t, ctx.logistic_subset));
        });
        if (ctx.linear_subset.size() > 0) row.acc_linear = lin;
        if (ctx.logistic_subset.size() > 0) row.acc_logistic = lgs;
    }
    return row;
}

TraceRow trace_from_archive(const SearchContext& ctx, std::int64_t generation,
                            const Archive& archive) {
    TraceRow row;
    row.generation = generation;
    row.evaluations = ctx.budget.used;
    row.best_fitness = archive.best_fitness();
    const auto elites = archive.elites();
    std::vector<std::pair<double, double>> hv_points;
    hv_points.reserve(elites.size());
    for (const Elite* e : elites) hv_points.emplace_back(e->fitness, e->desc.rep_power);
    const ExpressionTree* best = nullptr;
    if (!elites.empty())
        best = &(*argmax_fitness(elites.begin(), elites.end(),
                                 [](const Elite* e) { return e->fitness; }))
                    ->tree;
    return finish_trace_row(row, ctx, archive, best, hv_points, [&](auto&& visit) {
        for (const Elite* e : elites) visit(e->tree);
    });
}

Archive temp_archive_from(const SearchContext& ctx, std::span<const PopMember> population) {
    Archive a(ctx.cfg.clusters, ctx.cfg.limits.max_nodes, ctx.cfg.trans_cap);
    for (const auto& m : population) a.update(m.tree, m.fitness, m.loss, m.desc);
    return a;
}

TraceRow trace_from_population(const SearchContext& ctx, std::int64_t generation,
                               std::span<const PopMember> population) {
    TraceRow row;
    row.generation = generation;
    row.evaluations = ctx.budget.used;
    const Archive temp = temp_archive_from(ctx, population);
    std::vector<std::pair<double, double>> hv_points;
    hv_points.reserve(population.size());
    const ExpressionTree* best = nullptr;
    for (const auto& m : population) {
        hv_points.emplace_back(m.fitness, m.tree.node_count());
        row.best_fitness = std::max(row.best_fitness, m.fitness);
    }
    if (!population.empty())
        best = &argmax_fitness(population.begin(), population.end(),
                               [](const PopMember& m) { return m.fitness; })
                    ->tree;
    return finish_trace_row(row, ctx, temp, best, hv_points, [&](auto&& visit) {
        for (const auto& m : population) visit(m.tree);
    });
}

void append_final_row(std::vector<TraceRow>& rows, TraceRow row) {
    if (!rows.empty() && rows.back().evaluations == row.evaluations &&
        rows.back().generation == row.generation)
        return;
    rows.push_back(std::move(row));
}

// initial population evaluated member-wise; stops early if the budget runs out
std::vector<PopMember> evaluate_initial_population(SearchContext& ctx, Rng& init_rng) {
    std::vector<PopMember> pop;
    const auto trees =
        ramped_half_and_half(ctx.cfg.population, ctx.ds.input_dim, ctx.cfg.limits, init_rng);
    pop.reserve(trees.size());
    for (const auto& t : trees) {
        if (!ctx.budget.can(1)) break;
        const auto ev = ctx.score(t);
        pop.push_back(PopMember{t, ev.loss, ev.fitness, ev.desc});
    }
    return pop;
}

// shared SR/MOSR offspring pipeline: the child adopts the best coefficients
// found by the ES. Returns false when the budget cannot afford the child's
// evaluation (the current generation is then abandoned).
bool make_baseline_child(SearchContext& ctx, ExpressionTree child, std::vector<PopMember>& out) {
    if (!ctx.budget.can(1)) return false;
    const auto ev = ctx.score(child);
    ScoredEvaluation best_ev;
    ExpressionTree best = optimize_coefficients(child, ev, ctx.ds, ctx.cfg.loss, ctx.cfg.es,
                                                nullptr, ctx.assignment, &ctx.budget,
                                                ctx.search_rng, &best_ev);
    out.push_back(PopMember{std::move(best), best_ev.loss, best_ev.fitness, best_ev.desc});
    return true;
}

} // namespace

RunTrace run_drsr(const EngineConfig& config, const Dataset& ds) {
    SearchContext ctx(config, ds);
    RunTrace trace;
    trace.archive = Archive(config.clusters, config.limits.max_nodes, config.trans_cap);
    Archive& archive = trace.archive;

    Rng init_rng(derive_seed(config.seed, 3));
    const auto initial =
        ramped_half_and_half(config.population, ds.input_dim, config.limits, init_rng);
    for (const auto& t : initial) {
        if (!ctx.budget.can(1)) break;
        const auto ev = ctx.score(t);
        archive.update(t, ev.fitness, ev.loss, ev.desc);
    }
    trace.rows.push_back(trace_from_archive(ctx, 0, archive));

    std::int64_t offspring_done = 0;
    std::int64_t next_trace = config.trace_stride;
    bool out_of_budget = !ctx.budget.can(1) || archive.occupied() == 0;
    while (!out_of_budget) {
        const auto [p1, p2] = archive.select_two(ctx.search_rng);
        const auto [c1, c2] = ctx.vary(p1->tree, p2->tree);
        for (const ExpressionTree* child : {&c1, &c2}) {
            if (!ctx.budget.can(1)) {
                out_of_budget = true;
                break;
            }
            const auto ev = ctx.score(*child);
            archive.update(*child, ev.fitness, ev.loss, ev.desc);
            optimize_coefficients(*child, ev, ds, config.loss, config.es, &archive,
                                  ctx.assignment, &ctx.budget, ctx.search_rng);
            ++offspring_done;
            if (offspring_done >= next_trace) {
                trace.rows.push_back(trace_from_archive(ctx, offspring_done, archive));
                next_trace += config.trace_stride;
            }
        }
        out_of_budget = out_of_budget || !ctx.budget.can(1);
    }
    append_final_row(trace.rows, trace_from_archive(ctx, offspring_done, archive));
    trace.evaluations_used = ctx.budget.used;
    trace.assignment = std::move(ctx.assignment);
    return trace;
}

RunTrace run_sr(const EngineConfig& config, const Dataset& ds) {
    SearchContext ctx(config, ds);
    RunTrace trace;

    Rng init_rng(derive_seed(config.seed, 3));
    std::vector<PopMember> pop = evaluate_initial_population(ctx, init_rng);
    trace.rows.push_back(trace_from_population(ctx, 0, pop));

    std::int64_t generation = 0;
    while (ctx.budget.can(1) && !pop.empty()) {
        std::vector<double> fitnesses(pop.size());
        for (std::size_t i = 0; i < pop.size(); ++i) fitnesses[i] = pop[i].fitness;

        std::vector<PopMember> offspring;
        offspring.reserve(pop.size());
        bool aborted = false;
        while (offspring.size() < pop.size() && !aborted) {
            const int i1 = tournament_select(fitnesses, config.tournament, ctx.search_rng);
            const int i2 = tournament_select(fitnesses, config.tournament, ctx.search_rng);
            const auto [c1, c2] =
                ctx.vary(pop[static_cast<std::size_t>(i1)].tree, pop[static_cast<std::size_t>(i2)].tree);
            for (const ExpressionTree* child : {&c1, &c2}) {
                if (offspring.size() == pop.size()) break;
                if (!make_baseline_child(ctx, *child, offspring)) {
                    aborted = true; // partial generation is discarded
                    break;
                }
            }
        }
        if (aborted) break;

        // offspring minus its single worst, plus the parents' single best
        auto worst = offspring.begin();
        for (auto it = offspring.begin(); it != offspring.end(); ++it)
            if (it->fitness < worst->fitness) worst = it;
        const auto best_parent =
            argmax_fitness(pop.begin(), pop.end(), [](const PopMember& m) { return m.fitness; });
        *worst = *best_parent;
        pop = std::move(offspring);
        ++generation;
        trace.rows.push_back(trace_from_population(ctx, generation, pop));
    }

    append_final_row(trace.rows, trace_from_population(ctx, generation, pop));
    trace.evaluations_used = ctx.budget.used;
    trace.archive = temp_archive_from(ctx, pop);
    trace.population = std::move(pop);
    trace.assignment = std::move(ctx.assignment);
    return trace;
}

namespace {

struct RankedPopulation {
    std::vector<int> rank;
    std::vector<double> crowding;
};

RankedPopulation rank_population(std::span<const PopMember> pop) {
    std::vector<std::pair<double, int>> objs;
    objs.reserve(pop.size());
    for (const auto& m : pop) objs.emplace_back(m.fitness, m.tree.node_count());
    const auto fronts = fast_non_dominated_sort(objs);
    RankedPopulation r;
    r.rank.assign(pop.size(), 0);
    r.crowding.assign(pop.size(), 0.0);
    for (std::size_t f = 0; f < fronts.size(); ++f) {
        const auto dist = crowding_distances(objs, fronts[f]);
        for (std::size_t k = 0; k < fronts[f].size(); ++k) {
            r.rank[static_cast<std::size_t>(fronts[f][k])] = static_cast<int>(f);
            r.crowding[static_cast<std::size_t>(fronts[f][k])] = dist[k];
        }
    }
    return r;
}

int crowded_tournament(const RankedPopulation& ranked, std::size_t n, Rng& rng) {
    const int a = static_cast<int>(rng.uniform_index(n));
    const int b = static_cast<int>(rng.uniform_index(n));
    const auto sa = static_cast<std::size_t>(a);
    const auto sb = static_cast<std::size_t>(b);
    if (ranked.rank[sb] < ranked.rank[sa]) return b;
    if (ranked.rank[sa] == ranked.rank[sb] && ranked.crowding[sb] > ranked.crowding[sa]) return b;
    return a;
}

} // namespace

RunTrace run_mosr(const EngineConfig& config, const Dataset& ds) {
    SearchContext ctx(config, ds);
    RunTrace trace;

    Rng init_rng(derive_seed(config.seed, 3));
    std::vector<PopMember> pop = evaluate_initial_population(ctx, init_rng);
    trace.rows.push_back(trace_from_population(ctx, 0, pop));

    std::int64_t generation = 0;
    while (ctx.budget.can(1) && !pop.empty()) {
        const RankedPopulation ranked = rank_population(pop);

        std::vector<PopMember> offspring;
        offspring.reserve(pop.size());
        bool aborted = false;
        while (offspring.size() < pop.size() && !aborted) {
            const int i1 = crowded_tournament(ranked, pop.size(), ctx.search_rng);
            const int i2 = crowded_tournament(ranked, pop.size(), ctx.search_rng);
            const auto [c1, c2] =
                ctx.vary(pop[static_cast<std::size_t>(i1)].tree, pop[static_cast<std::size_t>(i2)].tree);
            for (const ExpressionTree* child : {&c1, &c2}) {
                if (offspring.size() == pop.size()) break;
                if (!make_baseline_child(ctx, *child, offspring)) {
                    aborted = true;
                    break;
                }
            }
        }
        if (aborted) break;

        // environmental selection over parents + offspring: fill by rank,
        // truncate the boundary front by crowding distance
        std::vector<PopMember> combined = std::move(pop);
        combined.insert(combined.end(), std::make_move_iterator(offspring.begin()),
                        std::make_move_iterator(offspring.end()));
        std::vector<std::pair<double, int>> objs;
        objs.reserve(combined.size());
        for (const auto& m : combined) objs.emplace_back(m.fitness, m.tree.node_count());
        const auto fronts = fast_non_dominated_sort(objs);

        std::vector<PopMember> next;
        next.reserve(static_cast<std::size_t>(config.population));
        const auto capacity = static_cast<std::size_t>(config.population);
        for (const auto& front : fronts) {
            if (next.size() >= capacity) break;
            if (next.size() + front.size() <= capacity) {
                for (int idx : front) next.push_back(std::move(combined[static_cast<std::size_t>(idx)]));
            } else {
                const auto dist = crowding_distances(objs, front);
                std::vector<std::size_t> order(front.size());
                std::iota(order.begin(), order.end(), std::size_t{0});
                std::stable_sort(order.begin(), order.end(),
                                 [&](std::size_t x, std::size_t y) { return dist[x] > dist[y]; });
                for (std::size_t k = 0; next.size() < capacity; ++k)
                    next.push_back(std::move(combined[static_cast<std::size_t>(front[order[k]])]));
            }
        }
        pop = std::move(next);
        ++generation;
        trace.rows.push_back(trace_from_population(ctx, generation, pop));
    }

    append_final_row(trace.rows, trace_from_population(ctx, generation, pop));
    trace.evaluations_used = ctx.budget.used;
    trace.archive = temp_archive_from(ctx, pop);
    trace.population = std::move(pop);
    trace.assignment = std::move(ctx.assignment);
    return trace;
}

RunTrace run_search(const EngineConfig& config, const Dataset& ds) {
    switch (config.method) {
    case Method::DRSR: return run_drsr(config, ds);
    case Method::SR: return run_sr(config, ds);
    case Method::MOSR: return run_mosr(config, ds);
    }
    throw std::logic_error("unreachable method");
}

} // namespace drsr
