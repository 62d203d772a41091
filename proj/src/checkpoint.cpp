#include "lipgan/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "lipgan/errors.hpp"

namespace lipgan {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little, "checkpoint blob assumes a little-endian host");

namespace {

constexpr std::string_view kHeader = "lipgan-checkpoint 1";
constexpr char kMagic[8] = {'L', 'I', 'P', 'G', 'A', 'N', 'B', '1'};

struct Slot {
  std::string name;
  ad::Matrix* target;
};

struct ConstSlot {
  std::string name;
  const ad::Matrix* source;
};

// Fixed tensor order: parameters, then first and second Adam moments, for the
// generator and then the critic.
template <typename State, typename SlotT, typename Get>
std::vector<SlotT> slots(State& state, Get get) {
  std::vector<SlotT> out;
  auto add_group = [&](const std::vector<NamedParam>& params, auto& opt) {
    for (std::size_t i = 0; i < params.size(); ++i) out.push_back({"param/" + params[i].name, get(params[i])});
    for (std::size_t i = 0; i < params.size(); ++i) out.push_back({"adam_m/" + params[i].name, &opt.first_moments().at(i)});
    for (std::size_t i = 0; i < params.size(); ++i) out.push_back({"adam_v/" + params[i].name, &opt.second_moments().at(i)});
  };
  add_group(state.generator.parameters(), state.generator_opt);
  add_group(state.critic.parameters(), state.critic_opt);
  return out;
}

std::string hexfloat(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

[[noreturn]] void fail(const fs::path& dir, const std::string& what) {
  throw IoError("checkpoint " + dir.string() + ": " + what);
}

std::uint64_t parse_u64(const fs::path& dir, const std::string& field, const std::string& text) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) fail(dir, "bad value for '" + field + "': '" + text + "'");
  return v;
}

}  // namespace

void write_checkpoint_dir(const fs::path& dir, const TrainState& state, const CheckpointExtras& extras) {
  fs::create_directories(dir);
  const auto tensors = slots<const TrainState, ConstSlot>(
      state, [](const NamedParam& p) { return &p.var.value(); });

  std::ostringstream manifest;
  manifest << kHeader << '\n';
  manifest << "iteration " << state.iteration << '\n';
  manifest << "stage_len " << state.stage.current_max << '\n';
  manifest << "teacher_ratio " << hexfloat(state.stage.teacher_ratio) << '\n';
  manifest << "generator_adam_steps " << state.generator_opt.steps() << '\n';
  manifest << "critic_adam_steps " << state.critic_opt.steps() << '\n';
  manifest << "rng " << state.rng.state() << '\n';
  for (const auto& [key, value] : extras) {
    if (key.empty() || key.find_first_of(" \t\n") != std::string::npos || value.find('\n') != std::string::npos) {
      throw Error("checkpoint extra '" + key + "' must be a single-line pair without spaces in the key");
    }
    manifest << "extra " << key << ' ' << value << '\n';
  }
  std::uint64_t offset = 0;
  for (const auto& t : tensors) {
    manifest << "tensor " << t.name << ' ' << t.source->rows() << 'x' << t.source->cols() << " f64 " << offset
             << '\n';
    offset += t.source->size();
  }

  {
    std::ofstream out(dir / kBlobFile, std::ios::binary | std::ios::trunc);
    out.write(kMagic, sizeof kMagic);
    out.write(reinterpret_cast<const char*>(&offset), sizeof offset);
    for (const auto& t : tensors) {
      out.write(reinterpret_cast<const char*>(t.source->values().data()),
                static_cast<std::streamsize>(t.source->size() * sizeof(double)));
    }
    out.flush();
    if (!out) fail(dir, "cannot write " + std::string(kBlobFile));
  }
  {
    std::ofstream out(dir / kManifestFile, std::ios::binary | std::ios::trunc);
    out << manifest.str();
    out.flush();
    if (!out) fail(dir, "cannot write " + std::string(kManifestFile));
  }
}

CheckpointExtras read_checkpoint_dir(const fs::path& dir, TrainState& state) {
  std::ifstream in(dir / kManifestFile, std::ios::binary);
  if (!in) fail(dir, "missing " + std::string(kManifestFile));

  std::string line;
  if (!std::getline(in, line) || line != kHeader) fail(dir, "bad manifest header");

  std::map<std::string, std::string> scalars;
  CheckpointExtras extras;
  struct Entry {
    std::string name;
    std::size_t rows;
    std::size_t cols;
    std::uint64_t offset;
  };
  std::vector<Entry> entries;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto space = line.find(' ');
    const std::string tag = line.substr(0, space);
    const std::string rest = space == std::string::npos ? "" : line.substr(space + 1);
    if (tag == "extra") {
      const auto sep = rest.find(' ');
      if (sep == std::string::npos) fail(dir, "malformed extra line");
      extras[rest.substr(0, sep)] = rest.substr(sep + 1);
    } else if (tag == "tensor") {
      std::istringstream fields(rest);
      std::string name, shape, dtype, offset;
      if (!(fields >> name >> shape >> dtype >> offset)) fail(dir, "malformed tensor line");
      if (dtype != "f64") fail(dir, "tensor '" + name + "' has dtype '" + dtype + "'");
      const auto x = shape.find('x');
      if (x == std::string::npos) fail(dir, "tensor '" + name + "' has bad shape '" + shape + "'");
      entries.push_back({name, parse_u64(dir, name + " rows", shape.substr(0, x)),
                         parse_u64(dir, name + " cols", shape.substr(x + 1)), parse_u64(dir, name + " offset", offset)});
    } else {
      if (!scalars.emplace(tag, rest).second) fail(dir, "duplicate field '" + tag + "'");
    }
  }

  auto scalar = [&](const std::string& key) -> const std::string& {
    const auto it = scalars.find(key);
    if (it == scalars.end()) fail(dir, "missing field '" + key + "'");
    return it->second;
  };
  const std::uint64_t iteration = parse_u64(dir, "iteration", scalar("iteration"));
  const std::uint64_t stage_len = parse_u64(dir, "stage_len", scalar("stage_len"));
  char* end = nullptr;
  const std::string& ratio_text = scalar("teacher_ratio");
  const double teacher_ratio = std::strtod(ratio_text.c_str(), &end);
  if (ratio_text.empty() || *end != '\0') fail(dir, "bad value for 'teacher_ratio'");
  const std::uint64_t gen_steps = parse_u64(dir, "generator_adam_steps", scalar("generator_adam_steps"));
  const std::uint64_t critic_steps = parse_u64(dir, "critic_adam_steps", scalar("critic_adam_steps"));
  Rng rng;
  try {
    rng.set_state(scalar("rng"));
  } catch (const std::exception&) {
    fail(dir, "bad value for 'rng'");
  }

  auto targets = slots<TrainState, Slot>(state, [](const NamedParam& p) {
    return &const_cast<NamedParam&>(p).var.mutable_value();
  });
  if (entries.size() != targets.size()) {
    fail(dir, "tensor count " + std::to_string(entries.size()) + ", expected " + std::to_string(targets.size()));
  }
  std::uint64_t expected_offset = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const auto* t = targets[i].target;
    if (e.name != targets[i].name) fail(dir, "tensor " + std::to_string(i) + " is '" + e.name + "', expected '" + targets[i].name + "'");
    if (e.rows != t->rows() || e.cols != t->cols()) {
      fail(dir, "tensor '" + e.name + "' has shape " + std::to_string(e.rows) + "x" + std::to_string(e.cols) +
                    ", expected " + t->shape_string());
    }
    if (e.offset != expected_offset) fail(dir, "tensor '" + e.name + "' offset " + std::to_string(e.offset));
    expected_offset += t->size();
  }

  std::ifstream blob(dir / kBlobFile, std::ios::binary);
  if (!blob) fail(dir, "missing " + std::string(kBlobFile));
  std::vector<char> bytes((std::istreambuf_iterator<char>(blob)), std::istreambuf_iterator<char>());
  constexpr std::size_t header = sizeof kMagic + sizeof(std::uint64_t);
  if (bytes.size() < header || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) fail(dir, "blob: bad magic");
  std::uint64_t count = 0;
  std::memcpy(&count, bytes.data() + sizeof kMagic, sizeof count);
  if (count != expected_offset) {
    fail(dir, "blob: value count " + std::to_string(count) + ", manifest needs " + std::to_string(expected_offset));
  }
  if (bytes.size() != header + count * sizeof(double)) {
    fail(dir, "blob: size " + std::to_string(bytes.size()) + " bytes, expected " +
                  std::to_string(header + count * sizeof(double)));
  }

  std::vector<ad::Matrix> loaded;
  loaded.reserve(targets.size());
  const char* cursor = bytes.data() + header;
  for (const auto& s : targets) {
    std::vector<double> values(s.target->size());
    std::memcpy(values.data(), cursor, values.size() * sizeof(double));
    cursor += values.size() * sizeof(double);
    loaded.emplace_back(s.target->rows(), s.target->cols(), std::move(values));
  }

  for (std::size_t i = 0; i < targets.size(); ++i) *targets[i].target = std::move(loaded[i]);
  state.iteration = iteration;
  state.stage = Stage{static_cast<std::size_t>(stage_len), teacher_ratio};
  state.generator_opt.set_steps(gen_steps);
  state.critic_opt.set_steps(critic_steps);
  state.rng = rng;
  return extras;
}

void save_checkpoint(const fs::path& run_dir, const TrainState& state, const CheckpointExtras& extras) {
  const fs::path final_dir = run_dir / "checkpoint";
  const fs::path tmp_dir = run_dir / "checkpoint.tmp";
  const fs::path old_dir = run_dir / "checkpoint.old";
  try {
    fs::remove_all(tmp_dir);
    write_checkpoint_dir(tmp_dir, state, extras);
    fs::remove_all(old_dir);
    if (fs::exists(final_dir)) fs::rename(final_dir, old_dir);
    fs::rename(tmp_dir, final_dir);
    fs::remove_all(old_dir);
  } catch (const fs::filesystem_error& e) {
    throw IoError(std::string("checkpoint save failed: ") + e.what());
  }
}

CheckpointExtras load_checkpoint(const fs::path& run_dir, TrainState& state) {
  const fs::path final_dir = run_dir / "checkpoint";
  if (fs::exists(final_dir / kManifestFile)) return read_checkpoint_dir(final_dir, state);
  const fs::path old_dir = run_dir / "checkpoint.old";
  if (fs::exists(old_dir / kManifestFile)) return read_checkpoint_dir(old_dir, state);
  throw IoError("no checkpoint under " + run_dir.string());
}

}  // namespace lipgan
