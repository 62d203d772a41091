#pragma once

// Training-state persistence. A checkpoint directory holds a text manifest
// (scalars, rng state, tensor table) and a binary blob of little-endian
// float64 values. Writes go to a temporary directory that is renamed into
// place, so a crash never leaves a half-written checkpoint behind.

#include <filesystem>
#include <map>
#include <string>

#include "lipgan/objectives.hpp"

namespace lipgan {

inline constexpr std::string_view kManifestFile = "manifest.txt";
inline constexpr std::string_view kBlobFile = "tensors.bin";

/// Free-form string pairs stored alongside the state (keys: no whitespace).
using CheckpointExtras = std::map<std::string, std::string>;

/// Writes `dir/manifest.txt` and `dir/tensors.bin`; `dir` is created.
void write_checkpoint_dir(const std::filesystem::path& dir, const TrainState& state,
                          const CheckpointExtras& extras = {});

/// Reads a checkpoint into `state`, whose shapes must already match (build it
/// with TrainState::create from the same config). Everything is validated
/// before `state` is touched; IoError names the offending field.
CheckpointExtras read_checkpoint_dir(const std::filesystem::path& dir, TrainState& state);

/// Atomic save to `run_dir/checkpoint`: write `checkpoint.tmp`, move the old
/// one to `checkpoint.old`, rename, then drop the old copy.
void save_checkpoint(const std::filesystem::path& run_dir, const TrainState& state,
                     const CheckpointExtras& extras = {});

/// Loads `run_dir/checkpoint`, falling back to `checkpoint.old` when the
/// primary is missing (a crash between the two renames).
CheckpointExtras load_checkpoint(const std::filesystem::path& run_dir, TrainState& state);

}  // namespace lipgan
