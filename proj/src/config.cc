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

#include "fedsim/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string_view>

#include "fedsim/errors.hpp"

namespace fedsim {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& expected) {
  throw ConfigError("config key '" + key + "': cannot read '" + value +
                    "' as " + expected);
}

template <typename Int>
Int to_int(const std::string& key, const std::string& value) {
  Int out{};
  const auto* end = value.data() + value.size();
  const auto res = std::from_chars(value.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end) bad_value(key, value, "an integer");
  return out;
}

double to_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto res = std::from_chars(value.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end) bad_value(key, value, "a number");
  return out;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "on" || value == "1") return true;
  if (value == "false" || value == "off" || value == "0") return false;
  bad_value(key, value, "a boolean (true/false)");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    out += items[i];
  }
  return out;
}

struct Key {
  std::string name;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

std::string optional_double(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string("auto");
}

const std::vector<Key>& registry() {
  static const std::vector<Key> keys = [] {
    std::vector<Key> k;
    auto add = [&](std::string name, auto set, auto get) {
      k.push_back({std::move(name), set, get});
    };
    // [federation]
    add("federation.n_clients",
        [](ExperimentConfig& c, const std::string& v) {
          c.federation.n_clients = to_int<int>("federation.n_clients", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.federation.n_clients); });
    add("federation.rounds",
        [](ExperimentConfig& c, const std::string& v) {
          c.federation.rounds = to_int<std::size_t>("federation.rounds", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.federation.rounds); });
    add("federation.local_epochs",
        [](ExperimentConfig& c, const std::string& v) {
          c.federation.local_epochs = to_int<std::size_t>("federation.local_epochs", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.federation.local_epochs); });
    add("federation.batch_size",
        [](ExperimentConfig& c, const std::string& v) {
          c.federation.batch_size = to_int<std::size_t>("federation.batch_size", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.federation.batch_size); });
    add("federation.client_ratio",
        [](ExperimentConfig& c, const std::string& v) {
          c.federation.client_ratio = to_double("federation.client_ratio", v);
        },
        [](const ExperimentConfig& c) { return format_double(c.federation.client_ratio); });
    add("federation.run_seed",
        [](ExperimentConfig& c, const std::string& v) {
          c.federation.run_seed = to_int<std::uint64_t>("federation.run_seed", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.federation.run_seed); });
    add("federation.workers",
        [](ExperimentConfig& c, const std::string& v) {
          c.federation.workers = to_int<int>("federation.workers", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.federation.workers); });
    add("federation.theory_checks",
        [](ExperimentConfig& c, const std::string& v) {
          c.federation.theory_checks = to_bool("federation.theory_checks", v);
        },
        [](const ExperimentConfig& c) {
          return std::string(c.federation.theory_checks ? "true" : "false");
        });
    add("federation.loss_eval_point",
        [](ExperimentConfig& c, const std::string& v) {
          if (v == "local") c.federation.loss_eval_point = EvalPoint::kLocal;
          else if (v == "global") c.federation.loss_eval_point = EvalPoint::kGlobal;
          else bad_value("federation.loss_eval_point", v, "local|global");
        },
        [](const ExperimentConfig& c) {
          return std::string(c.federation.loss_eval_point == EvalPoint::kLocal ? "local"
                                                                               : "global");
        });
    // [strategy]
    add("strategy.name",
        [](ExperimentConfig& c, const std::string& v) {
          try {
            c.strategy.kind = parse_strategy(v);
          } catch (const ConfigError&) {
            bad_value("strategy.name", v, "fedavg|fedmax|fedmax_k|fedsoftmax");
          }
        },
        [](const ExperimentConfig& c) { return std::string(to_string(c.strategy.kind)); });
    add("strategy.k",
        [](ExperimentConfig& c, const std::string& v) {
          c.strategy.k = to_int<int>("strategy.k", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.strategy.k); });
    add("strategy.temperature",
        [](ExperimentConfig& c, const std::string& v) {
          c.strategy.temperature = to_double("strategy.temperature", v);
        },
        [](const ExperimentConfig& c) { return format_double(c.strategy.temperature); });
    // [schedule]
    add("schedule.kind",
        [](ExperimentConfig& c, const std::string& v) {
          if (v == "exponential") c.schedule.kind = ScheduleKind::kExponential;
          else if (v == "theoretical") c.schedule.kind = ScheduleKind::kTheoretical;
          else bad_value("schedule.kind", v, "exponential|theoretical");
        },
        [](const ExperimentConfig& c) {
          return std::string(c.schedule.kind == ScheduleKind::kExponential ? "exponential"
                                                                           : "theoretical");
        });
    add("schedule.eta0",
        [](ExperimentConfig& c, const std::string& v) {
          c.schedule.eta0 = to_double("schedule.eta0", v);
        },
        [](const ExperimentConfig& c) { return format_double(c.schedule.eta0); });
    add("schedule.decay",
        [](ExperimentConfig& c, const std::string& v) {
          c.schedule.decay = to_double("schedule.decay", v);
        },
        [](const ExperimentConfig& c) { return format_double(c.schedule.decay); });
    add("schedule.mu",
        [](ExperimentConfig& c, const std::string& v) {
          if (v == "auto") c.schedule.mu.reset();
          else c.schedule.mu = to_double("schedule.mu", v);
        },
        [](const ExperimentConfig& c) { return optional_double(c.schedule.mu); });
    add("schedule.gamma",
        [](ExperimentConfig& c, const std::string& v) {
          if (v == "auto") c.schedule.gamma.reset();
          else c.schedule.gamma = to_double("schedule.gamma", v);
        },
        [](const ExperimentConfig& c) { return optional_double(c.schedule.gamma); });
    // [model]
    add("model.kind",
        [](ExperimentConfig& c, const std::string& v) {
          if (v == "quadratic") c.model.kind = ModelKind::kQuadratic;
          else if (v == "logistic") c.model.kind = ModelKind::kLogistic;
          else if (v == "tiny_mlp") c.model.kind = ModelKind::kTinyMlp;
          else bad_value("model.kind", v, "quadratic|logistic|tiny_mlp");
        },
        [](const ExperimentConfig& c) { return std::string(to_string(c.model.kind)); });
    add("model.ridge",
        [](ExperimentConfig& c, const std::string& v) {
          c.model.ridge = to_double("model.ridge", v);
        },
        [](const ExperimentConfig& c) { return format_double(c.model.ridge); });
    add("model.hidden",
        [](ExperimentConfig& c, const std::string& v) {
          c.model.hidden = to_int<std::size_t>("model.hidden", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.model.hidden); });
    // [data]
    add("data.source",
        [](ExperimentConfig& c, const std::string& v) {
          if (v == "synthetic") c.data.source = DataSource::kSynthetic;
          else if (v == "idx") c.data.source = DataSource::kIdx;
          else if (v == "quadratic") c.data.source = DataSource::kQuadratic;
          else bad_value("data.source", v, "synthetic|idx|quadratic");
        },
        [](const ExperimentConfig& c) {
          switch (c.data.source) {
            case DataSource::kSynthetic: return std::string("synthetic");
            case DataSource::kIdx: return std::string("idx");
            case DataSource::kQuadratic: return std::string("quadratic");
          }
          return std::string("synthetic");
        });
    add("data.seed",
        [](ExperimentConfig& c, const std::string& v) {
          c.data.seed = to_int<std::uint64_t>("data.seed", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.data.seed); });
    add("data.classes",
        [](ExperimentConfig& c, const std::string& v) { c.data.classes = to_int<int>("data.classes", v); },
        [](const ExperimentConfig& c) { return std::to_string(c.data.classes); });
    add("data.per_class",
        [](ExperimentConfig& c, const std::string& v) { c.data.per_class = to_int<int>("data.per_class", v); },
        [](const ExperimentConfig& c) { return std::to_string(c.data.per_class); });
    add("data.dim",
        [](ExperimentConfig& c, const std::string& v) { c.data.dim = to_int<int>("data.dim", v); },
        [](const ExperimentConfig& c) { return std::to_string(c.data.dim); });
    add("data.separation",
        [](ExperimentConfig& c, const std::string& v) { c.data.separation = to_double("data.separation", v); },
        [](const ExperimentConfig& c) { return format_double(c.data.separation); });
    add("data.test_fraction",
        [](ExperimentConfig& c, const std::string& v) {
          c.data.test_fraction = to_double("data.test_fraction", v);
        },
        [](const ExperimentConfig& c) { return format_double(c.data.test_fraction); });
    add("data.train_images",
        [](ExperimentConfig& c, const std::string& v) { c.data.train_images = v; },
        [](const ExperimentConfig& c) { return c.data.train_images; });
    add("data.train_labels",
        [](ExperimentConfig& c, const std::string& v) { c.data.train_labels = v; },
        [](const ExperimentConfig& c) { return c.data.train_labels; });
    add("data.test_images",
        [](ExperimentConfig& c, const std::string& v) { c.data.test_images = v; },
        [](const ExperimentConfig& c) { return c.data.test_images; });
    add("data.test_labels",
        [](ExperimentConfig& c, const std::string& v) { c.data.test_labels = v; },
        [](const ExperimentConfig& c) { return c.data.test_labels; });
    add("data.limit",
        [](ExperimentConfig& c, const std::string& v) { c.data.limit = to_int<std::size_t>("data.limit", v); },
        [](const ExperimentConfig& c) { return std::to_string(c.data.limit); });
    add("data.quad_dim",
        [](ExperimentConfig& c, const std::string& v) { c.data.quad_dim = to_int<int>("data.quad_dim", v); },
        [](const ExperimentConfig& c) { return std::to_string(c.data.quad_dim); });
    add("data.spread",
        [](ExperimentConfig& c, const std::string& v) { c.data.spread = to_double("data.spread", v); },
        [](const ExperimentConfig& c) { return format_double(c.data.spread); });
    add("data.curvature_min",
        [](ExperimentConfig& c, const std::string& v) {
          c.data.curvature_min = to_double("data.curvature_min", v);
        },
        [](const ExperimentConfig& c) { return format_double(c.data.curvature_min); });
    add("data.curvature_max",
        [](ExperimentConfig& c, const std::string& v) {
          c.data.curvature_max = to_double("data.curvature_max", v);
        },
        [](const ExperimentConfig& c) { return format_double(c.data.curvature_max); });
    add("data.jitter_variance",
        [](ExperimentConfig& c, const std::string& v) {
          c.data.jitter_variance = to_double("data.jitter_variance", v);
        },
        [](const ExperimentConfig& c) { return format_double(c.data.jitter_variance); });
    add("data.samples_per_client",
        [](ExperimentConfig& c, const std::string& v) {
          c.data.samples_per_client = to_int<std::size_t>("data.samples_per_client", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.data.samples_per_client); });
    add("data.random_weights",
        [](ExperimentConfig& c, const std::string& v) {
          c.data.random_weights = to_bool("data.random_weights", v);
        },
        [](const ExperimentConfig& c) {
          return std::string(c.data.random_weights ? "true" : "false");
        });
    // [partition]
    add("partition.mode",
        [](ExperimentConfig& c, const std::string& v) {
          if (v == "iid") c.partition.mode = PartitionMode::kIid;
          else if (v == "shards") c.partition.mode = PartitionMode::kShards;
          else if (v == "handpick") c.partition.mode = PartitionMode::kHandpick;
          else bad_value("partition.mode", v, "iid|shards|handpick");
        },
        [](const ExperimentConfig& c) {
          switch (c.partition.mode) {
            case PartitionMode::kIid: return std::string("iid");
            case PartitionMode::kShards: return std::string("shards");
            case PartitionMode::kHandpick: return std::string("handpick");
          }
          return std::string("shards");
        });
    add("partition.client_dataset_size",
        [](ExperimentConfig& c, const std::string& v) {
          c.partition.client_dataset_size =
              to_int<std::size_t>("partition.client_dataset_size", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.partition.client_dataset_size); });
    add("partition.shard_size",
        [](ExperimentConfig& c, const std::string& v) {
          c.partition.shard_size = to_int<std::size_t>("partition.shard_size", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.partition.shard_size); });
    add("partition.seed",
        [](ExperimentConfig& c, const std::string& v) {
          c.partition.seed = to_int<std::uint64_t>("partition.seed", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.partition.seed); });
    add("partition.handpick",
        [](ExperimentConfig& c, const std::string& v) {
          c.partition.handpick.clear();
          for (const auto& item : split_list(v)) {
            c.partition.handpick.push_back(to_int<int>("partition.handpick", item));
          }
        },
        [](const ExperimentConfig& c) {
          std::vector<std::string> items;
          for (int o : c.partition.handpick) items.push_back(std::to_string(o));
          return join(items);
        });
    // [evaluation]
    add("evaluation.accuracy_threshold",
        [](ExperimentConfig& c, const std::string& v) {
          c.evaluation.accuracy_threshold = to_double("evaluation.accuracy_threshold", v);
        },
        [](const ExperimentConfig& c) { return format_double(c.evaluation.accuracy_threshold); });
    add("evaluation.g2_safety",
        [](ExperimentConfig& c, const std::string& v) {
          c.evaluation.g2_safety = to_double("evaluation.g2_safety", v);
        },
        [](const ExperimentConfig& c) { return format_double(c.evaluation.g2_safety); });
    add("evaluation.oracle_tol",
        [](ExperimentConfig& c, const std::string& v) {
          c.evaluation.oracle_tol = to_double("evaluation.oracle_tol", v);
        },
        [](const ExperimentConfig& c) { return format_double(c.evaluation.oracle_tol); });
    add("evaluation.oracle_max_iterations",
        [](ExperimentConfig& c, const std::string& v) {
          c.evaluation.oracle_max_iterations =
              to_int<int>("evaluation.oracle_max_iterations", v);
        },
        [](const ExperimentConfig& c) {
          return std::to_string(c.evaluation.oracle_max_iterations);
        });
    add("evaluation.compute_optima",
        [](ExperimentConfig& c, const std::string& v) {
          c.evaluation.compute_optima = to_bool("evaluation.compute_optima", v);
        },
        [](const ExperimentConfig& c) {
          return std::string(c.evaluation.compute_optima ? "true" : "false");
        });
    add("evaluation.participation_top",
        [](ExperimentConfig& c, const std::string& v) {
          c.evaluation.participation_top =
              to_int<std::size_t>("evaluation.participation_top", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.evaluation.participation_top); });
    // [sweep]
    add("sweep.strategies",
        [](ExperimentConfig& c, const std::string& v) {
          c.sweep.strategies.clear();
          for (const auto& item : split_list(v)) {
            try {
              c.sweep.strategies.push_back(parse_strategy(item));
            } catch (const ConfigError&) {
              bad_value("sweep.strategies", item, "fedavg|fedmax|fedmax_k|fedsoftmax");
            }
          }
        },
        [](const ExperimentConfig& c) {
          std::vector<std::string> items;
          for (auto s : c.sweep.strategies) items.emplace_back(to_string(s));
          return join(items);
        });
    add("sweep.framework",
        [](ExperimentConfig& c, const std::string& v) { c.sweep.framework = v; },
        [](const ExperimentConfig& c) { return c.sweep.framework; });
    add("sweep.seeds",
        [](ExperimentConfig& c, const std::string& v) {
          c.sweep.seeds = to_int<std::size_t>("sweep.seeds", v);
        },
        [](const ExperimentConfig& c) { return std::to_string(c.sweep.seeds); });
    return k;
  }();
  return keys;
}

const Key* find_key(const std::string& name) {
  for (const auto& k : registry()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string ExperimentConfig::framework_label() const {
  if (!sweep.framework.empty()) return sweep.framework;
  if (data.source == DataSource::kQuadratic) return "QUAD";
  switch (partition.mode) {
    case PartitionMode::kIid:
      return "IID";
    case PartitionMode::kShards:
      return "NIID";
    case PartitionMode::kHandpick:
      return "HANDPICK";
  }
  return "NIID";
}

void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& key, const std::string& why) {
    throw ConfigError("config key '" + key + "': " + why);
  };
  if (c.federation.client_ratio != 1.0) {
    fail("federation.client_ratio", "only full participation (C = 1) is supported");
  }
  if (c.federation.n_clients < 1) fail("federation.n_clients", "must be >= 1");
  if (c.federation.local_epochs < 1) fail("federation.local_epochs", "must be >= 1");
  if (c.federation.batch_size < 1) fail("federation.batch_size", "must be >= 1");
  if (c.federation.workers < 1) fail("federation.workers", "must be >= 1");
  if (c.strategy.kind == StrategyKind::kFedMaxK &&
      (c.strategy.k < 1 || c.strategy.k > c.federation.n_clients)) {
    fail("strategy.k", "must lie in [1, n_clients]");
  }
  if (!(c.strategy.temperature > 0.0)) fail("strategy.temperature", "must be > 0");
  if (c.schedule.kind == ScheduleKind::kExponential) {
    if (!(c.schedule.eta0 > 0.0)) fail("schedule.eta0", "must be > 0");
    if (!(c.schedule.decay > 0.0)) fail("schedule.decay", "must be > 0");
  }
  if (c.schedule.mu && !(*c.schedule.mu > 0.0)) fail("schedule.mu", "must be > 0");
  if (c.schedule.gamma && !(*c.schedule.gamma > 0.0)) fail("schedule.gamma", "must be > 0");
  if (c.model.ridge < 0.0) fail("model.ridge", "must be >= 0");
  if (c.model.kind == ModelKind::kLogistic && c.evaluation.compute_optima &&
      c.model.ridge < 1e-6) {
    fail("model.ridge", "logistic optima need ridge >= 1e-6");
  }
  if (c.model.hidden < 1) fail("model.hidden", "must be >= 1");
  const bool quad_data = c.data.source == DataSource::kQuadratic;
  const bool quad_model = c.model.kind == ModelKind::kQuadratic;
  if (quad_data != quad_model) {
    fail("model.kind", "quadratic models go with data.source = quadratic");
  }
  if (quad_data) {
    if (c.data.quad_dim < 1) fail("data.quad_dim", "must be >= 1");
    if (!(c.data.curvature_min > 0.0)) fail("data.curvature_min", "must be > 0");
    if (c.data.curvature_max < c.data.curvature_min) {
      fail("data.curvature_max", "must be >= curvature_min");
    }
    if (c.data.jitter_variance < 0.0) fail("data.jitter_variance", "must be >= 0");
    if (c.data.samples_per_client < 1) fail("data.samples_per_client", "must be >= 1");
  }
  if (c.schedule.kind == ScheduleKind::kTheoretical && !quad_data &&
      c.model.kind == ModelKind::kTinyMlp && !c.schedule.mu) {
    fail("schedule.mu", "theoretical schedule on tiny_mlp needs an explicit mu");
  }
  if (c.data.source == DataSource::kSynthetic) {
    if (c.data.classes < 2) fail("data.classes", "must be >= 2");
    if (c.data.per_class < 1) fail("data.per_class", "must be >= 1");
    if (c.data.dim < 1) fail("data.dim", "must be >= 1");
    if (!(c.data.test_fraction >= 0.0 && c.data.test_fraction < 1.0)) {
      fail("data.test_fraction", "must lie in [0, 1)");
    }
  }
  if (c.data.source == DataSource::kIdx &&
      (c.data.train_images.empty() || c.data.train_labels.empty())) {
    fail("data.train_images", "idx data needs train_images and train_labels");
  }
  if (!quad_data) {
    if (c.partition.client_dataset_size < 1) {
      fail("partition.client_dataset_size", "must be >= 1");
    }
    if (c.partition.shard_size < 1) fail("partition.shard_size", "must be >= 1");
    if (c.partition.mode == PartitionMode::kHandpick && c.partition.handpick.empty()) {
      fail("partition.handpick", "hand-pick mode needs a shard owner list");
    }
  }
  if (!(c.evaluation.accuracy_threshold > 0.0 && c.evaluation.accuracy_threshold < 1.0)) {
    fail("evaluation.accuracy_threshold", "must lie in (0, 1)");
  }
  if (!(c.evaluation.g2_safety >= 1.0)) fail("evaluation.g2_safety", "must be >= 1");
  if (!(c.evaluation.oracle_tol > 0.0)) fail("evaluation.oracle_tol", "must be > 0");
  if (c.evaluation.oracle_max_iterations < 1) {
    fail("evaluation.oracle_max_iterations", "must be >= 1");
  }
  if (c.sweep.seeds < 1) fail("sweep.seeds", "must be >= 1");
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find_first_of("#;");
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(line_no) + ": unterminated section");
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const std::string full = section.empty() ? key : section + "." + key;
    const Key* entry = find_key(full);
    if (entry == nullptr) throw ConfigError("unknown config key '" + full + "'");
    if (!seen.insert(full).second) {
      throw ConfigError("config key '" + full + "' given twice");
    }
    entry->set(cfg, value);
  }
  if (cfg.strategy.kind == StrategyKind::kFedMaxK && !seen.count("strategy.k")) {
    throw ConfigError("config key 'strategy.k': required when strategy.name = fedmax_k");
  }
  for (auto s : cfg.sweep.strategies) {
    if (s == StrategyKind::kFedMaxK && !seen.count("strategy.k")) {
      throw ConfigError("config key 'strategy.k': required when sweeping fedmax_k");
    }
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  std::string section;
  for (const auto& k : registry()) {
    const auto dot = k.name.find('.');
    const std::string sec = k.name.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) out << "\n";
      out << "[" << sec << "]\n";
      section = sec;
    }
    out << k.name.substr(dot + 1) << " = " << k.get(cfg) << "\n";
  }
  return out.str();
}

}  // namespace fedsim
