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

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <set>

#include <gtest/gtest.h>

#include "fedsim/dataset.hpp"
#include "fedsim/errors.hpp"
#include "test_util.hpp"

namespace fedsim {
namespace {

namespace fs = std::filesystem;

LabeledDataset labelled(std::vector<int> labels, int classes) {
  LabeledDataset ds;
  ds.dim = 1;
  ds.class_count = classes;
  ds.labels = std::move(labels);
  for (std::size_t i = 0; i < ds.labels.size(); ++i) ds.features.push_back(double(i));
  return ds;
}

std::vector<std::size_t> class_counts(const LabeledDataset& ds,
                                      const std::vector<std::size_t>& idx) {
  std::vector<std::size_t> out(ds.class_count, 0);
  for (std::size_t i : idx) ++out[ds.labels[i]];
  return out;
}

void expect_disjoint_nonempty(const Partition& p, std::size_t n) {
  std::vector<int> seen(n, 0);
  for (const auto& idx : p.assignment) {
    EXPECT_FALSE(idx.empty());
    for (std::size_t i : idx) {
      ASSERT_LT(i, n);
      ++seen[i];
    }
  }
  std::size_t covered = 0;
  for (int s : seen) {
    EXPECT_LE(s, 1);
    covered += s;
  }
  EXPECT_EQ(covered + p.dropped, n);
}

// Each client holds whole, aligned runs of the label-sorted order.
void expect_whole_shards(const LabeledDataset& ds, const Partition& p, std::size_t shard) {
  const auto sorted = label_sorted_indices(ds);
  std::vector<std::size_t> pos(ds.size());
  for (std::size_t k = 0; k < sorted.size(); ++k) pos[sorted[k]] = k;
  for (const auto& idx : p.assignment) {
    ASSERT_EQ(idx.size() % shard, 0u);
    ASSERT_GE(idx.size(), shard);
    std::vector<std::size_t> mine;
    for (std::size_t i : idx) mine.push_back(pos[i]);
    std::sort(mine.begin(), mine.end());
    for (std::size_t s = 0; s < mine.size(); s += shard) {
      EXPECT_EQ(mine[s] % shard, 0u);
      for (std::size_t k = 1; k < shard; ++k) {
        EXPECT_EQ(mine[s + k], mine[s] + k);
        EXPECT_LE(ds.labels[sorted[mine[s + k - 1]]], ds.labels[sorted[mine[s + k]]]);
      }
    }
  }
}

double mean_distinct_labels(const LabeledDataset& ds, const Partition& p) {
  double total = 0.0;
  for (const auto& idx : p.assignment) {
    std::set<int> labels;
    for (std::size_t i : idx) labels.insert(ds.labels[i]);
    total += labels.size();
  }
  return total / p.client_count();
}

TEST(SynthBlobs, CountsAndDeterminism) {
  const auto a = synth_blobs(2, 5, 2, 42);
  EXPECT_EQ(a.size(), 10u);
  EXPECT_EQ(a.dim, 2u);
  EXPECT_EQ(a.histogram(), (std::vector<std::size_t>{5, 5}));
  const auto b = synth_blobs(2, 5, 2, 42);
  EXPECT_EQ(a.features, b.features);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_NE(a.features, synth_blobs(2, 5, 2, 43).features);
}

TEST(SplitHoldout, StratifiedAndDisjoint) {
  const auto ds = synth_blobs(4, 50, 3, 1);
  const auto split = split_holdout(ds, 0.1, 1);
  EXPECT_EQ(split.train.size() + split.test.size(), ds.size());
  EXPECT_EQ(split.test.histogram(), (std::vector<std::size_t>{5, 5, 5, 5}));
}

TEST(PartitionIid, TwoByTwo) {
  const auto ds = labelled({0, 0, 0, 0, 0, 1, 1, 1, 1, 1}, 2);
  const std::vector<std::size_t> sizes{4, 4};
  const auto p = partition_iid(ds, sizes, 3);
  for (const auto& idx : p.assignment) {
    EXPECT_EQ(class_counts(ds, idx), (std::vector<std::size_t>{2, 2}));
  }
  EXPECT_EQ(p.dropped, 2u);
}

TEST(PartitionIid, WholeDataset) {
  const auto ds = labelled({0, 1, 1, 2, 2, 2, 0, 1, 2, 2}, 3);
  const std::vector<std::size_t> sizes{10};
  const auto p = partition_iid(ds, sizes, 3);
  EXPECT_EQ(class_counts(ds, p.assignment[0]), ds.histogram());
  expect_disjoint_nonempty(p, ds.size());
  EXPECT_EQ(p.dropped, 0u);
}

TEST(PartitionIid, RejectsInfeasible) {
  const auto ds = labelled({0, 1, 0, 1}, 2);
  EXPECT_THROW(partition_iid(ds, std::vector<std::size_t>{3, 2}, 1), PartitionError);
  EXPECT_THROW(partition_iid(ds, std::vector<std::size_t>{2, 0}, 1), PartitionError);
}

TEST(PartitionShards, TenSamplesThreeClients) {
  const auto ds = labelled({0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, 10);
  const auto p = partition_shards(ds, 3, 2, 4, 5);
  std::size_t shards = 0;
  for (const auto& idx : p.assignment) {
    EXPECT_GE(idx.size() / 2, 1u);
    EXPECT_LE(idx.size() / 2, 3u);
    shards += idx.size() / 2;
  }
  EXPECT_EQ(shards, 5u);
  expect_whole_shards(ds, p, 2);
  expect_disjoint_nonempty(p, ds.size());
}

TEST(PartitionShards, SingleClientOwnsEverything) {
  const auto ds = labelled({2, 0, 1, 1, 0}, 3);
  const auto p = partition_shards(ds, 1, ds.size(), 5, 1);
  EXPECT_EQ(p.assignment[0].size(), ds.size());
  EXPECT_EQ(p.dropped, 0u);
}

TEST(PartitionShards, TooFewShards) {
  const auto ds = labelled({0, 1, 2, 3}, 4);
  EXPECT_THROW(partition_shards(ds, 3, 2, 2, 1), PartitionError);
}

TEST(PartitionShards, LargerShardsGiveFewerLabels) {
  // 600 samples per class so that both shard sizes stay inside one class.
  const auto ds = synth_blobs(10, 600, 2, 4);
  const auto normal = partition_shards(ds, 20, 60, 200, 9);
  const auto very = partition_shards(ds, 20, 100, 200, 9);
  EXPECT_LT(mean_distinct_labels(ds, very), mean_distinct_labels(ds, normal));
}

TEST(PartitionShards, Determinism) {
  const auto ds = synth_blobs(5, 40, 2, 4);
  const auto a = partition_shards(ds, 6, 20, 30, 17);
  const auto b = partition_shards(ds, 6, 20, 30, 17);
  EXPECT_EQ(a.assignment, b.assignment);
}

TEST(PartitionHandpick, FollowsOwnerMap) {
  const auto ds = labelled({0, 0, 1, 1, 2, 2}, 3);
  const std::vector<int> owner{1, -1, 0};
  const auto p = partition_handpick(ds, 2, 2, owner);
  EXPECT_EQ(class_counts(ds, p.assignment[0]), (std::vector<std::size_t>{0, 0, 2}));
  EXPECT_EQ(class_counts(ds, p.assignment[1]), (std::vector<std::size_t>{2, 0, 0}));
  EXPECT_EQ(p.dropped, 2u);
  EXPECT_THROW(partition_handpick(ds, 2, 2, std::vector<int>{0, 0, 0}), PartitionError);
  EXPECT_THROW(partition_handpick(ds, 2, 2, std::vector<int>{0, 1}), PartitionError);
  EXPECT_THROW(partition_handpick(ds, 2, 2, std::vector<int>{0, 5, 1}), PartitionError);
}

// Disjointness, coverage and shape over 200 seeds.
TEST(PartitionProperties, RandomSeeds) {
  const auto ds = synth_blobs(6, 50, 2, 12);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const int clients = 2 + static_cast<int>(seed % 9);
    const std::size_t shard = 5 + seed % 11;
    const auto p = partition_shards(ds, clients, shard, 20 + seed % 30, seed);
    ASSERT_EQ(p.client_count(), static_cast<std::size_t>(clients));
    expect_disjoint_nonempty(p, ds.size());
    expect_whole_shards(ds, p, shard);

    std::vector<std::size_t> sizes(clients, 10 + seed % 17);
    const auto q = partition_iid(ds, sizes, seed);
    expect_disjoint_nonempty(q, ds.size());
    const auto hist = ds.histogram();
    for (std::size_t c = 0; c < q.client_count(); ++c) {
      const auto counts = class_counts(ds, q.assignment[c]);
      for (std::size_t k = 0; k < hist.size(); ++k) {
        const double expected = double(sizes[c]) * hist[k] / ds.size();
        EXPECT_LE(std::abs(double(counts[k]) - expected), 1.0);
      }
    }
  }
}

void put_u32(std::ofstream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

void write_images(const fs::path& path, std::uint32_t magic, std::uint32_t count,
                  std::uint32_t rows, std::uint32_t cols, const std::vector<unsigned char>& px) {
  std::ofstream out(path, std::ios::binary);
  put_u32(out, magic);
  put_u32(out, count);
  put_u32(out, rows);
  put_u32(out, cols);
  out.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
}

void write_labels(const fs::path& path, std::uint32_t magic, std::uint32_t count,
                  const std::vector<unsigned char>& labels) {
  std::ofstream out(path, std::ios::binary);
  put_u32(out, magic);
  put_u32(out, count);
  out.write(reinterpret_cast<const char*>(labels.data()),
            static_cast<std::streamsize>(labels.size()));
}

class IdxFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = testing::temp_dir("idx");
    std::vector<unsigned char> px(18);
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<unsigned char>(i * 15);
    px[17] = 255;
    write_images(dir_ / "img", 0x803, 2, 3, 3, px);
    write_labels(dir_ / "lbl", 0x801, 2, {7, 2});
  }
  fs::path dir_;
};

TEST_F(IdxFixture, TwoImagesOfNinePixels) {
  const auto ds = load_idx(dir_ / "img", dir_ / "lbl");
  EXPECT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.dim, 9u);
  EXPECT_EQ(ds.labels, (std::vector<int>{7, 2}));
  EXPECT_EQ(ds.class_count, 8);
  EXPECT_EQ(ds.sample(1)[8], 1.0);
  EXPECT_DOUBLE_EQ(ds.sample(0)[1], 15.0 / 255.0);
  EXPECT_EQ(ds.sample(0)[0], 0.0);
}

TEST_F(IdxFixture, CountMismatch) {
  write_labels(dir_ / "lbl3", 0x801, 3, {1, 2, 3});
  EXPECT_THROW(load_idx(dir_ / "img", dir_ / "lbl3"), IngestionError);
}

TEST_F(IdxFixture, BadMagicNamesOffset) {
  write_labels(dir_ / "bad", 0x802, 2, {1, 2});
  try {
    load_idx(dir_ / "img", dir_ / "bad");
    FAIL() << "expected IngestionError";
  } catch (const IngestionError& e) {
    EXPECT_NE(std::string(e.what()).find("offset 0"), std::string::npos) << e.what();
  }
}

TEST_F(IdxFixture, TruncatedImages) {
  write_images(dir_ / "short", 0x803, 2, 3, 3, std::vector<unsigned char>(10, 1));
  try {
    load_idx(dir_ / "short", dir_ / "lbl");
    FAIL() << "expected IngestionError";
  } catch (const IngestionError& e) {
    EXPECT_NE(std::string(e.what()).find("offset"), std::string::npos) << e.what();
  }
}

TEST_F(IdxFixture, MissingFile) {
  EXPECT_THROW(load_idx(dir_ / "nope", dir_ / "lbl"), IngestionError);
}

}  // namespace
}  // namespace fedsim
