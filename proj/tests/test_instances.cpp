#include <gtest/gtest.h>

#include <random>

#include "celltrack/instances.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace celltrack {
namespace {

using testing::fill_rect;

TEST(ExtractInstances, TwoPixelCellCentroidUsesColumnAsX) {
  LabelImage mask(4, 3, 0);
  mask(0, 0) = 1;
  mask(1, 0) = 1;
  const auto cells = extract_instances(mask, 1);
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_EQ(cells[0].label, 1u);
  EXPECT_DOUBLE_EQ(cells[0].centroid.x, 0.5);
  EXPECT_DOUBLE_EQ(cells[0].centroid.y, 0.0);
  EXPECT_EQ(cells[0].area, 2u);
}

TEST(ExtractInstances, EmptyMask) {
  EXPECT_TRUE(extract_instances(LabelImage(5, 5, 0), 1).empty());
}

TEST(ExtractInstances, AreasMatchHistogramAndSortedByLabel) {
  LabelImage mask(10, 10, 0);
  fill_rect<Label>(mask, 6, 6, 3, 3, 7);
  fill_rect<Label>(mask, 0, 0, 2, 2, 3);
  const auto cells = extract_instances(mask, 4);
  const auto hist = oracle::label_histogram(mask);
  ASSERT_EQ(cells.size(), 2u);
  EXPECT_EQ(cells[0].label, 3u);
  EXPECT_EQ(cells[1].label, 7u);
  EXPECT_EQ(cells[0].area, hist.at(3));
  EXPECT_EQ(cells[1].area, hist.at(7));
  EXPECT_EQ(cells[0].area, 4u);
  EXPECT_EQ(cells[1].area, 9u);
  EXPECT_EQ(cells[1].frame_index, 4u);
}

TEST(ExtractInstances, RectangleCentroidIsGeometricCenter) {
  LabelImage mask(20, 20, 0);
  fill_rect<Label>(mask, 3, 5, 6, 9, 2);  // columns 3..8, rows 5..13
  const auto cells = extract_instances(mask, 1);
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_DOUBLE_EQ(cells[0].centroid.x, 5.5);
  EXPECT_DOUBLE_EQ(cells[0].centroid.y, 9.0);
}

TEST(ExtractInstances, AreaSumEqualsForegroundAndIsDeterministic) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<Label> lab(0, 6);
  for (int trial = 0; trial < 20; ++trial) {
    LabelImage mask(17, 11, 0);
    for (auto& px : mask.pixels()) px = lab(rng);
    const auto cells = extract_instances(mask, 1);
    std::size_t total = 0;
    for (const auto& c : cells) {
      total += c.area;
      EXPECT_GE(c.centroid.x, 0.0);
      EXPECT_LE(c.centroid.x, 16.0);
      EXPECT_GE(c.centroid.y, 0.0);
      EXPECT_LE(c.centroid.y, 10.0);
    }
    std::size_t foreground = 0;
    for (const Label l : mask.pixels()) foreground += l != 0;
    EXPECT_EQ(total, foreground);
    EXPECT_EQ(cells, extract_instances(mask, 1));
  }
}

TEST(FilterMinArea, Threshold) {
  const std::vector<CellInstance> cells{testing::cell(1, 0, 0, 3), testing::cell(2, 0, 0, 10),
                                        testing::cell(3, 0, 0, 50)};
  const auto kept = filter_min_area(cells, 10);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].area, 10u);
  EXPECT_EQ(kept[1].area, 50u);
  EXPECT_EQ(filter_min_area(cells, 0), cells);
  EXPECT_TRUE(filter_min_area({testing::cell(1, 0, 0, 9)}, 10).empty());
}

TEST(EraseSmallInstances, ZeroesOnlySmallLabels) {
  LabelMaskStack masks;
  masks.masks.emplace_back(8, 8, 0);
  fill_rect<Label>(masks.masks[0], 0, 0, 1, 2, 1);
  fill_rect<Label>(masks.masks[0], 4, 4, 3, 3, 2);
  const auto out = erase_small_instances(masks, 3);
  const auto hist = oracle::label_histogram(out.masks[0]);
  EXPECT_EQ(hist.count(1), 0u);
  EXPECT_EQ(hist.at(2), 9u);
}

}  // namespace
}  // namespace celltrack
