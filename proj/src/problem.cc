/*
 * Copyright 2026 The fedsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fedsim/problem.hpp"

#include <random>

#include "fedsim/errors.hpp"
#include "fedsim/rng.hpp"
#include "fedsim/theory.hpp"

namespace fedsim {
namespace {

Problem quadratic_problem(const ExperimentConfig& cfg) {
  const auto& d = cfg.data;
  const int n = cfg.federation.n_clients;
  Rng rng = make_stream(d.seed, StreamTag::kData);
  std::uniform_real_distribution<double> centre(-d.spread, d.spread);
  std::uniform_real_distribution<double> curv(d.curvature_min, d.curvature_max);
  std::uniform_real_distribution<double> weight(0.5, 1.5);

  std::vector<std::shared_ptr<const LossModel>> models;
  std::vector<double> raw(n, 1.0);
  for (int i = 0; i < n; ++i) {
    ParamVector c(static_cast<std::size_t>(d.quad_dim));
    for (auto& x : c) x = centre(rng);
    const double a = d.curvature_min == d.curvature_max ? d.curvature_min : curv(rng);
    if (d.random_weights) raw[i] = weight(rng);
    models.push_back(std::make_shared<QuadraticModel>(std::move(c), a, d.samples_per_client,
                                                      d.jitter_variance));
  }
  std::vector<double> p(n);
  if (d.random_weights) {
    CompensatedSum total;
    for (double r : raw) total.add(r);
    for (int i = 0; i < n; ++i) p[i] = raw[i] / total.value();
  } else {
    for (int i = 0; i < n; ++i) p[i] = 1.0 / n;
  }
  return make_problem(std::move(models), std::move(p));
}

TrainTestSplit load_data(const DataConfig& d) {
  if (d.source == DataSource::kSynthetic) {
    const auto all = synth_blobs(d.classes, d.per_class, d.dim, d.seed, d.separation);
    return split_holdout(all, d.test_fraction, d.seed);
  }
  LabeledDataset train = load_idx(d.train_images, d.train_labels);
  if (d.limit > 0 && d.limit < train.size()) {
    std::vector<std::size_t> first(d.limit);
    for (std::size_t i = 0; i < d.limit; ++i) first[i] = i;
    train = train.subset(first);
  }
  if (d.test_images.empty() || d.test_labels.empty()) {
    return split_holdout(train, 0.1, d.seed);
  }
  LabeledDataset test = load_idx(d.test_images, d.test_labels);
  if (test.dim != train.dim) {
    throw IngestionError("test images are " + std::to_string(test.dim) +
                         " pixels but train images are " + std::to_string(train.dim));
  }
  test.class_count = train.class_count = std::max(train.class_count, test.class_count);
  return {std::move(train), std::move(test)};
}

}  // namespace

Problem make_problem(std::vector<std::shared_ptr<const LossModel>> models,
                     std::vector<double> p, const MinimizeOptions& options,
                     bool compute_optima) {
  Problem out;
  out.objective = std::make_shared<GlobalObjective>(models, p);
  out.p = std::move(p);
  out.client_sizes.reserve(models.size());
  for (const auto& m : models) out.client_sizes.push_back(m->sample_count());
  out.f_star.assign(models.size(), 0.0);
  if (!compute_optima) return out;

  bool known = true;
  for (std::size_t i = 0; i < models.size() && known; ++i) {
    if (auto opt = local_optimum(*models[i], options)) {
      out.f_star[i] = opt->value;
    } else {
      known = false;
    }
  }
  if (!known) {
    out.f_star.assign(models.size(), 0.0);
    return out;
  }
  out.f_star_known = true;
  out.global = global_optimum(*out.objective, options);
  if (out.global) {
    out.f_at_opt.resize(models.size());
    for (std::size_t i = 0; i < models.size(); ++i) {
      out.f_at_opt[i] = models[i]->loss(out.global->point);
    }
    out.Gamma = heterogeneity_gamma(out.global->value, out.p, out.f_star);
  }
  return out;
}

Problem build_problem(const ExperimentConfig& cfg) {
  validate(cfg);
  if (cfg.data.source == DataSource::kQuadratic) return quadratic_problem(cfg);

  TrainTestSplit data = load_data(cfg.data);
  const auto& part = cfg.partition;
  const int n = cfg.federation.n_clients;
  Partition partition;
  switch (part.mode) {
    case PartitionMode::kIid: {
      const std::vector<std::size_t> sizes(n, part.client_dataset_size);
      partition = partition_iid(data.train, sizes, part.seed);
      break;
    }
    case PartitionMode::kShards:
      partition = partition_shards(data.train, n, part.shard_size,
                                   part.client_dataset_size, part.seed);
      break;
    case PartitionMode::kHandpick:
      partition = partition_handpick(data.train, n, part.shard_size, part.handpick);
      break;
  }

  std::vector<std::shared_ptr<const LossModel>> models;
  std::vector<double> p(n);
  std::size_t total = 0;
  for (const auto& idx : partition.assignment) total += idx.size();
  for (int i = 0; i < n; ++i) {
    LabeledDataset local = data.train.subset(partition.assignment[i]);
    local.class_count = data.train.class_count;
    p[i] = static_cast<double>(partition.assignment[i].size()) / static_cast<double>(total);
    if (cfg.model.kind == ModelKind::kLogistic) {
      models.push_back(std::make_shared<LogisticModel>(std::move(local), cfg.model.ridge));
    } else {
      models.push_back(
          std::make_shared<TinyMlpModel>(std::move(local), cfg.model.hidden, cfg.model.ridge));
    }
  }
  const MinimizeOptions options{cfg.evaluation.oracle_tol, cfg.evaluation.oracle_max_iterations};
  Problem out = make_problem(std::move(models), std::move(p), options,
                             cfg.evaluation.compute_optima);
  out.test = std::move(data.test);
  out.dropped = partition.dropped;
  return out;
}

ParamVector initial_point(const Problem& problem, std::uint64_t run_seed) {
  if (problem.kind() == ModelKind::kTinyMlp) {
    return static_cast<const TinyMlpModel&>(problem.objective->model(0)).initial_params(run_seed);
  }
  return ParamVector(problem.dim());
}

}  // namespace fedsim
