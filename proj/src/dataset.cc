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

#include "fedsim/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <sstream>
#include <string>

#include "fedsim/errors.hpp"
#include "fedsim/rng.hpp"

namespace fedsim {

LabeledDataset LabeledDataset::subset(
    std::span<const std::size_t> indices) const {
  LabeledDataset out;
  out.dim = dim;
  out.class_count = class_count;
  out.features.reserve(indices.size() * dim);
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) {
    const auto x = sample(i);
    out.features.insert(out.features.end(), x.begin(), x.end());
    out.labels.push_back(labels[i]);
  }
  return out;
}

std::vector<std::size_t> LabeledDataset::histogram() const {
  std::vector<std::size_t> h(static_cast<std::size_t>(class_count), 0);
  for (int y : labels) ++h[static_cast<std::size_t>(y)];
  return h;
}

LabeledDataset synth_blobs(int class_count, int per_class, int dim,
                           std::uint64_t seed, double separation) {
  if (class_count <= 0 || per_class <= 0 || dim <= 0) {
    throw ConfigError("synth_blobs: all sizes must be positive");
  }
  Rng rng = make_stream(seed, StreamTag::kData);
  std::uniform_real_distribution<double> centre(-separation, separation);
  std::normal_distribution<double> noise(0.0, 1.0);

  const auto d = static_cast<std::size_t>(dim);
  std::vector<double> centres(static_cast<std::size_t>(class_count) * d);
  for (double& c : centres) c = centre(rng);

  LabeledDataset ds;
  ds.dim = d;
  ds.class_count = class_count;
  ds.features.reserve(static_cast<std::size_t>(class_count * per_class) * d);
  for (int c = 0; c < class_count; ++c) {
    for (int s = 0; s < per_class; ++s) {
      for (std::size_t k = 0; k < d; ++k) {
        ds.features.push_back(centres[static_cast<std::size_t>(c) * d + k] +
                              noise(rng));
      }
      ds.labels.push_back(c);
    }
  }
  return ds;
}

namespace {

std::vector<std::vector<std::size_t>> indices_by_class(
    const LabeledDataset& ds) {
  std::vector<std::vector<std::size_t>> by_class(
      static_cast<std::size_t>(ds.class_count));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    by_class[static_cast<std::size_t>(ds.labels[i])].push_back(i);
  }
  return by_class;
}

}  // namespace

TrainTestSplit split_holdout(const LabeledDataset& ds, double test_fraction,
                             std::uint64_t seed) {
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test fraction must lie in [0, 1)");
  }
  Rng rng = make_stream(seed, StreamTag::kHoldout);
  std::vector<std::size_t> train_idx, test_idx;
  for (auto& members : indices_by_class(ds)) {
    std::shuffle(members.begin(), members.end(), rng);
    const auto n_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(members.size())));
    test_idx.insert(test_idx.end(), members.begin(), members.begin() + n_test);
    train_idx.insert(train_idx.end(), members.begin() + n_test, members.end());
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  return {ds.subset(train_idx), ds.subset(test_idx)};
}

Partition partition_iid(const LabeledDataset& ds,
                        std::span<const std::size_t> client_sizes,
                        std::uint64_t seed) {
  if (client_sizes.empty()) throw PartitionError("no clients requested");
  const std::size_t total = std::accumulate(
      client_sizes.begin(), client_sizes.end(), std::size_t{0});
  if (total > ds.size()) {
    throw PartitionError("requested " + std::to_string(total) +
                         " samples but the dataset holds " +
                         std::to_string(ds.size()));
  }
  const auto hist = ds.histogram();
  const auto classes = hist.size();
  const double n = static_cast<double>(ds.size());

  Rng rng = make_stream(seed, StreamTag::kPartition);
  auto pools = indices_by_class(ds);
  for (auto& pool : pools) std::shuffle(pool.begin(), pool.end(), rng);
  std::vector<std::size_t> cursor(classes, 0);

  Partition out;
  out.assignment.resize(client_sizes.size());
  for (std::size_t client = 0; client < client_sizes.size(); ++client) {
    const std::size_t size = client_sizes[client];
    if (size == 0) {
      throw PartitionError("client " + std::to_string(client) +
                           " would be empty");
    }
    // Largest-remainder apportionment of `size` over the class histogram.
    std::vector<std::size_t> quota(classes);
    std::vector<double> remainder(classes);
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < classes; ++c) {
      const double exact = static_cast<double>(size) *
                           static_cast<double>(hist[c]) / n;
      quota[c] = static_cast<std::size_t>(std::floor(exact));
      remainder[c] = exact - static_cast<double>(quota[c]);
      assigned += quota[c];
    }
    std::vector<std::size_t> order(classes);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto spare = [&](std::size_t c) {
      return static_cast<double>(hist[c]) -
             static_cast<double>(cursor[c] + quota[c]);
    };
    // Ties on the remainder go to the class with the most samples left, so
    // consecutive clients do not all round up the same class.
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       if (remainder[a] != remainder[b]) {
                         return remainder[a] > remainder[b];
                       }
                       return spare(a) > spare(b);
                     });
    for (std::size_t c : order) {
      if (assigned == size) break;
      if (spare(c) >= 1.0 && remainder[c] > 0.0) {
        ++quota[c];
        ++assigned;
      }
    }
    if (assigned != size) {
      throw PartitionError("client " + std::to_string(client) +
                           ": cannot preserve label proportions");
    }
    for (std::size_t c = 0; c < classes; ++c) {
      if (cursor[c] + quota[c] > hist[c]) {
        throw PartitionError("class " + std::to_string(c) +
                             " exhausted while serving client " +
                             std::to_string(client));
      }
      auto& mine = out.assignment[client];
      mine.insert(mine.end(), pools[c].begin() + cursor[c],
                  pools[c].begin() + cursor[c] + quota[c]);
      cursor[c] += quota[c];
    }
    std::sort(out.assignment[client].begin(), out.assignment[client].end());
  }
  out.dropped = ds.size() - total;
  return out;
}

std::vector<std::size_t> label_sorted_indices(const LabeledDataset& ds) {
  std::vector<std::size_t> idx(ds.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return ds.labels[a] < ds.labels[b];
  });
  return idx;
}

namespace {

Partition assemble_shards(const std::vector<std::size_t>& sorted,
                          std::size_t shard_size, std::size_t n_shards,
                          std::span<const int> owner, int n_clients) {
  Partition out;
  out.assignment.resize(static_cast<std::size_t>(n_clients));
  std::size_t used = 0;
  for (std::size_t s = 0; s < n_shards; ++s) {
    if (owner[s] < 0) continue;
    auto& mine = out.assignment[static_cast<std::size_t>(owner[s])];
    mine.insert(mine.end(), sorted.begin() + s * shard_size,
                sorted.begin() + (s + 1) * shard_size);
    used += shard_size;
  }
  // Remainder samples and unowned shards.
  out.dropped = sorted.size() - used;
  return out;
}

}  // namespace

Partition partition_shards(const LabeledDataset& ds, int n_clients,
                           std::size_t shard_size,
                           std::size_t client_dataset_size,
                           std::uint64_t seed) {
  if (n_clients <= 0 || shard_size == 0) {
    throw PartitionError("shard partition needs clients and a shard size");
  }
  const std::size_t n_shards = ds.size() / shard_size;
  const auto clients = static_cast<std::size_t>(n_clients);
  if (n_shards < clients) {
    throw PartitionError(std::to_string(n_shards) + " shards of size " +
                         std::to_string(shard_size) + " cannot serve " +
                         std::to_string(n_clients) + " clients");
  }
  Rng rng = make_stream(seed, StreamTag::kPartition);
  std::vector<std::size_t> shards(n_shards);
  std::iota(shards.begin(), shards.end(), std::size_t{0});
  std::shuffle(shards.begin(), shards.end(), rng);

  std::vector<int> owner(n_shards, -1);
  for (std::size_t c = 0; c < clients; ++c) owner[shards[c]] = static_cast<int>(c);

  const auto wanted = static_cast<std::size_t>(std::llround(
      static_cast<double>(clients * client_dataset_size) /
      static_cast<double>(shard_size)));
  const std::size_t extra =
      std::min(n_shards - clients, wanted > clients ? wanted - clients : 0);
  std::uniform_int_distribution<int> pick(0, n_clients - 1);
  for (std::size_t s = 0; s < extra; ++s) owner[shards[clients + s]] = pick(rng);

  return assemble_shards(label_sorted_indices(ds), shard_size, n_shards, owner,
                         n_clients);
}

Partition partition_handpick(const LabeledDataset& ds, int n_clients,
                             std::size_t shard_size,
                             std::span<const int> shard_owner) {
  if (n_clients <= 0 || shard_size == 0) {
    throw PartitionError("hand-pick partition needs clients and a shard size");
  }
  const std::size_t n_shards = ds.size() / shard_size;
  if (shard_owner.size() != n_shards) {
    throw PartitionError("hand-pick map lists " +
                         std::to_string(shard_owner.size()) +
                         " shards; dataset has " + std::to_string(n_shards));
  }
  std::vector<int> count(static_cast<std::size_t>(n_clients), 0);
  for (int o : shard_owner) {
    if (o >= n_clients) {
      throw PartitionError("hand-pick map names client " + std::to_string(o));
    }
    if (o >= 0) ++count[static_cast<std::size_t>(o)];
  }
  for (int c = 0; c < n_clients; ++c) {
    if (count[static_cast<std::size_t>(c)] == 0) {
      throw PartitionError("hand-pick map leaves client " + std::to_string(c) +
                           " without a shard");
    }
  }
  return assemble_shards(label_sorted_indices(ds), shard_size, n_shards,
                         shard_owner, n_clients);
}

// ---------------------------------------------------------------------------
// IDX

namespace {

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<unsigned char>& bytes,
                        std::size_t offset, const std::filesystem::path& path) {
  if (offset + 4 > bytes.size()) {
    throw IngestionError(path.string() + ": truncated header at offset " +
                         std::to_string(offset));
  }
  return (std::uint32_t{bytes[offset]} << 24) |
         (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) |
         std::uint32_t{bytes[offset + 3]};
}

void expect_magic(std::uint32_t got, std::uint32_t want,
                  const std::filesystem::path& path) {
  if (got != want) {
    std::ostringstream msg;
    msg << path.string() << ": bad magic 0x" << std::hex << got
        << " at offset 0 (expected 0x" << want << ")";
    throw IngestionError(msg.str());
  }
}

}  // namespace

LabeledDataset load_idx(const std::filesystem::path& images_path,
                        const std::filesystem::path& labels_path) {
  const auto images = read_file(images_path);
  const auto labels = read_file(labels_path);

  expect_magic(read_be32(images, 0, images_path), 0x00000803u, images_path);
  const std::size_t count = read_be32(images, 4, images_path);
  const std::size_t rows = read_be32(images, 8, images_path);
  const std::size_t cols = read_be32(images, 12, images_path);
  const std::size_t pixels = rows * cols;
  constexpr std::size_t kImageHeader = 16;
  if (images.size() < kImageHeader + count * pixels) {
    throw IngestionError(images_path.string() + ": truncated at offset " +
                         std::to_string(images.size()) + ", expected " +
                         std::to_string(kImageHeader + count * pixels) +
                         " bytes");
  }

  expect_magic(read_be32(labels, 0, labels_path), 0x00000801u, labels_path);
  const std::size_t label_count = read_be32(labels, 4, labels_path);
  constexpr std::size_t kLabelHeader = 8;
  if (label_count != count) {
    throw IngestionError(labels_path.string() + ": label count " +
                         std::to_string(label_count) + " at offset 4 does not "
                         "match image count " + std::to_string(count));
  }
  if (labels.size() < kLabelHeader + count) {
    throw IngestionError(labels_path.string() + ": truncated at offset " +
                         std::to_string(labels.size()) + ", expected " +
                         std::to_string(kLabelHeader + count) + " bytes");
  }

  LabeledDataset ds;
  ds.dim = pixels;
  ds.features.resize(count * pixels);
  ds.labels.resize(count);
  for (std::size_t i = 0; i < count * pixels; ++i) {
    ds.features[i] = static_cast<double>(images[kImageHeader + i]) / 255.0;
  }
  int max_label = 0;
  for (std::size_t i = 0; i < count; ++i) {
    ds.labels[i] = labels[kLabelHeader + i];
    max_label = std::max(max_label, ds.labels[i]);
  }
  ds.class_count = max_label + 1;
  return ds;
}

}  // namespace fedsim
