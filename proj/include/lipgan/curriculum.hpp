#pragma once

// Sequence-length curriculum: the maximum length grows by one every
// `iterations_per_stage` iterations, and the teacher-helping ratio decays
// multiplicatively at each stage change.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "lipgan/corpus.hpp"
#include "lipgan/rng.hpp"

namespace lipgan {

struct CurriculumSchedule {
  std::size_t max_length = 25;
  std::size_t start_length = 1;
  std::size_t iterations_per_stage = 1000;
  bool variable_length = true;
  double teacher_ratio_start = 0.0;
  double teacher_decay = 1.0;

  void validate() const;
};

struct Stage {
  std::size_t current_max = 1;
  double teacher_ratio = 0.0;

  friend bool operator==(const Stage&, const Stage&) = default;
};

Stage initial_stage(const CurriculumSchedule& schedule);

/// Called with the number of completed iterations; moves to the next stage
/// whenever that count is a positive multiple of iterations_per_stage.
Stage advance(const Stage& stage, std::uint64_t iteration, const CurriculumSchedule& schedule);

/// Uniform in [1, current_max] when variable, else current_max.
std::size_t sample_length(const Stage& stage, bool variable, Rng& rng);

/// With probability teacher_ratio, the first ceil(teacher_ratio * length)
/// tokens of `real`; otherwise nothing.
std::optional<Sentence> teacher_prefix(std::span<const TokenId> real, std::size_t length,
                                       const Stage& stage, Rng& rng);

}  // namespace lipgan
