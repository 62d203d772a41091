#include "lipgan/curriculum.hpp"

#include <algorithm>
#include <cmath>

#include "lipgan/errors.hpp"

namespace lipgan {

void CurriculumSchedule::validate() const {
  if (max_length < 1) throw ConfigError("curriculum: max_len must be at least 1");
  if (start_length < 1 || start_length > max_length) {
    throw ConfigError("curriculum: start_len must lie in [1, max_len]");
  }
  if (iterations_per_stage < 1) throw ConfigError("curriculum: iters_per_stage must be positive");
  if (!(teacher_ratio_start >= 0.0 && teacher_ratio_start <= 1.0)) {
    throw ConfigError("curriculum: teacher_start must lie in [0, 1]");
  }
  if (!(teacher_decay >= 0.0 && teacher_decay <= 1.0)) {
    throw ConfigError("curriculum: teacher_decay must lie in [0, 1]");
  }
}

Stage initial_stage(const CurriculumSchedule& schedule) {
  return {schedule.start_length, schedule.teacher_ratio_start};
}

Stage advance(const Stage& stage, std::uint64_t iteration, const CurriculumSchedule& schedule) {
  if (iteration == 0 || iteration % schedule.iterations_per_stage != 0) return stage;
  Stage next = stage;
  next.current_max = std::min(stage.current_max + 1, schedule.max_length);
  next.teacher_ratio = std::clamp(stage.teacher_ratio * schedule.teacher_decay, 0.0, 1.0);
  return next;
}

std::size_t sample_length(const Stage& stage, bool variable, Rng& rng) {
  if (!variable || stage.current_max <= 1) return std::max<std::size_t>(stage.current_max, 1);
  return static_cast<std::size_t>(rng.uniform_int(1, stage.current_max));
}

std::optional<Sentence> teacher_prefix(std::span<const TokenId> real, std::size_t length,
                                       const Stage& stage, Rng& rng) {
  if (stage.teacher_ratio <= 0.0) return std::nullopt;
  if (real.size() < length) throw Error("teacher_prefix: real sentence shorter than the sequence");
  if (rng.uniform() >= stage.teacher_ratio) return std::nullopt;
  const auto n = std::min(length, static_cast<std::size_t>(
                                      std::ceil(stage.teacher_ratio * static_cast<double>(length))));
  return Sentence(real.begin(), real.begin() + static_cast<std::ptrdiff_t>(n));
}

}  // namespace lipgan
