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

#ifndef FEDSIM_DATASET_HPP_
#define FEDSIM_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace fedsim {

// Row-major feature matrix with one integer label per row.
struct LabeledDataset {
  std::size_t dim = 0;
  int class_count = 0;
  std::vector<double> features;  // size() * dim values
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  std::span<const double> sample(std::size_t i) const {
    return {features.data() + i * dim, dim};
  }

  // Rows selected by `indices`, in that order.
  LabeledDataset subset(std::span<const std::size_t> indices) const;

  // Per-class sample counts.
  std::vector<std::size_t> histogram() const;
};

// Client id -> sample indices into the dataset the partition was built from.
struct Partition {
  std::vector<std::vector<std::size_t>> assignment;
  // Samples left unassigned by shard arithmetic.
  std::size_t dropped = 0;

  std::size_t client_count() const { return assignment.size(); }
};

// One isotropic Gaussian blob per class; centres drawn uniformly in
// [-separation, separation]^dim, unit-variance noise around them.
LabeledDataset synth_blobs(int class_count, int per_class, int dim,
                           std::uint64_t seed, double separation = 4.0);

struct TrainTestSplit {
  LabeledDataset train;
  LabeledDataset test;
};

// Stratified hold-out: round(test_fraction * n_c) samples of each class go to
// the test set, chosen by a seeded shuffle.
TrainTestSplit split_holdout(const LabeledDataset& ds, double test_fraction,
                             std::uint64_t seed);

// Each client receives `client_sizes[i]` samples whose label histogram
// matches the global one within one sample per class (largest-remainder
// rounding). Throws PartitionError when the sizes cannot be met.
Partition partition_iid(const LabeledDataset& ds,
                        std::span<const std::size_t> client_sizes,
                        std::uint64_t seed);

// Label-sorted contiguous shards dealt at random. Every client receives at
// least one shard; the remaining shards go to clients in a seeded order so
// that client sizes approach `client_dataset_size` without being equalised.
Partition partition_shards(const LabeledDataset& ds, int n_clients,
                           std::size_t shard_size,
                           std::size_t client_dataset_size,
                           std::uint64_t seed);

// Hand-pick mode: shard_owner[s] is the client that owns shard s of the
// label-sorted dataset, or -1 to leave the shard unused.
Partition partition_handpick(const LabeledDataset& ds, int n_clients,
                             std::size_t shard_size,
                             std::span<const int> shard_owner);

// Indices of `ds` in stable label order. Shard construction builds on this.
std::vector<std::size_t> label_sorted_indices(const LabeledDataset& ds);

// Big-endian IDX pair (images magic 0x00000803, labels magic 0x00000801).
// Pixels are scaled to [0, 1]. class_count is max label + 1.
LabeledDataset load_idx(const std::filesystem::path& images_path,
                        const std::filesystem::path& labels_path);

}  // namespace fedsim

#endif  // FEDSIM_DATASET_HPP_
