//
// SPDX-License-Identifier: Apache-2.0
//

#include "rxngrow/encoders.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <sstream>

#include "rxngrow/errors.h"
#include "rxngrow/util/hash.h"
#include "rxngrow/util/io.h"
#include "rxngrow/util/rng.h"
#include "rxngrow/util/subprocess.h"

namespace rxngrow {
namespace {

constexpr int kHashBits = 256;
constexpr char kCacheMagic[8] = {'R', 'X', 'E', 'M', 'B', 'C', '0', '1'};

std::uint64_t seed_from(const std::string &text) {
  const Digest d = sha256(text);
  std::uint64_t s = 0;
  for (int i = 0; i < 8; ++i)
    s = (s << 8) | d[i];
  return s;
}

void put_u32(std::string &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i)
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const unsigned char *p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8
         | std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}

void check_vector(const std::vector<float> &v, int dim,
                  const std::string &what) {
  if (static_cast<int>(v.size()) != dim)
    throw EncoderUnavailableError(what + ": expected dim "
                                  + std::to_string(dim) + ", got "
                                  + std::to_string(v.size()));
  for (float x: v)
    if (!std::isfinite(x))
      throw EncoderUnavailableError(what + ": non-finite entry");
}

bool valid_sequence(const std::string &s) {
  if (s.empty())
    return false;
  for (char c: s)
    if (std::string_view("ACDEFGHIKLMNPQRSTVWYX").find(c)
        == std::string_view::npos)
      return false;
  return true;
}

Embedding make_embedding(std::vector<float> v, const EncoderSpec &spec) {
  Embedding e;
  e.dim = spec.dim;
  e.encoder_id = spec.encoder_id;
  e.vector = std::move(v);
  return e;
}

}  // namespace

StubEncoder::StubEncoder(EncoderSpec spec): spec_(std::move(spec)) {
  if (spec_.dim <= 0)
    throw ConfigError("encoder dim must be positive");
  Rng rng(seed_from("projection:" + spec_.encoder_id));
  projection_.resize(static_cast<size_t>(spec_.dim) * kHashBits);
  for (double &w: projection_)
    w = rng.normal();
}

std::vector<float> StubEncoder::encode_one(const std::string &input) const {
  const Digest d = sha256(spec_.encoder_id + '\x1f' + input);
  double bits[kHashBits];
  for (int j = 0; j < kHashBits; ++j)
    bits[j] = (d[j / 8] >> (j % 8)) & 1 ? 1.0 : -1.0;
  std::vector<double> v(spec_.dim);
  double norm2 = 0;
  for (int i = 0; i < spec_.dim; ++i) {
    const double *row = &projection_[static_cast<size_t>(i) * kHashBits];
    double acc = 0;
    for (int j = 0; j < kHashBits; ++j)
      acc += row[j] * bits[j];
    v[i] = acc;
    norm2 += acc * acc;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  std::vector<float> out(spec_.dim);
  for (int i = 0; i < spec_.dim; ++i)
    out[i] = static_cast<float>(v[i] * inv);
  return out;
}

std::vector<std::vector<float>> StubEncoder::encode_batch(
    const std::vector<std::string> &inputs) {
  std::vector<std::vector<float>> out;
  out.reserve(inputs.size());
  for (const auto &s: inputs)
    out.push_back(encode_one(s));
  return out;
}

BatchFileEncoder::BatchFileEncoder(EncoderSpec spec,
                                   std::vector<std::string> command,
                                   std::string work_dir)
    : spec_(std::move(spec)),
      command_(std::move(command)),
      work_dir_(std::move(work_dir)) {
  if (command_.empty())
    throw ConfigError("batch encoder needs a command");
}

std::vector<std::vector<float>> BatchFileEncoder::encode_batch(
    const std::vector<std::string> &inputs) {
  if (inputs.empty())
    return {};
  for (const auto &s: inputs)
    if (s.find('\n') != std::string::npos)
      throw EncoderUnavailableError("encoder input contains a newline");
  std::filesystem::create_directories(work_dir_);
  const std::string stem = work_dir_ + "/" + spec_.encoder_id.substr(
      0, spec_.encoder_id.find('/')) + "-" + std::to_string(calls_++);
  const std::string request = stem + ".request";
  const std::string response = stem + ".response";
  std::string body;
  for (const auto &s: inputs)
    body += s + "\n";
  write_file_atomic(request, body);
  std::filesystem::remove(response);

  std::vector<std::string> argv = command_;
  argv.push_back(request);
  argv.push_back(response);
  ProcessResult r;
  try {
    r = run_process(argv);
  } catch (const ToolNotFoundError &e) {
    throw EncoderUnavailableError(std::string("encoder service absent: ")
                                  + e.what());
  }
  if (r.exit_code != 0)
    throw EncoderUnavailableError("encoder exited with code "
                                  + std::to_string(r.exit_code) + ": "
                                  + r.err);
  std::vector<std::string> lines;
  try {
    lines = read_lines(response);
  } catch (const FormatError &) {
    throw EncoderUnavailableError("encoder wrote no response file");
  }
  while (!lines.empty() && lines.back().empty())
    lines.pop_back();
  if (lines.size() != inputs.size())
    throw EncoderUnavailableError("encoder returned "
                                  + std::to_string(lines.size())
                                  + " vectors for "
                                  + std::to_string(inputs.size()) + " inputs");
  std::vector<std::vector<float>> out;
  for (const auto &line: lines) {
    std::istringstream is(line);
    std::vector<float> v;
    double x;
    while (is >> x)
      v.push_back(static_cast<float>(x));
    if (!is.eof())
      throw EncoderUnavailableError("unparseable encoder response line");
    check_vector(v, spec_.dim, "encoder response");
    out.push_back(std::move(v));
  }
  return out;
}

EmbeddingCache::EmbeddingCache(std::string path): path_(std::move(path)) {
  if (file_exists(path_)) {
    const std::string data = read_file(path_);
    if (data.size() < sizeof(kCacheMagic)
        || std::memcmp(data.data(), kCacheMagic, sizeof(kCacheMagic)) != 0)
      throw FormatError("not an embedding cache: " + path_);
    size_t pos = sizeof(kCacheMagic);
    const auto *p = reinterpret_cast<const unsigned char *>(data.data());
    while (pos < data.size()) {
      if (data.size() - pos < 68)
        throw FormatError("truncated embedding cache record: " + path_);
      std::string key = data.substr(pos, 64);
      const std::uint32_t dim = get_u32(p + pos + 64);
      pos += 68;
      if (data.size() - pos < 4ull * dim)
        throw FormatError("truncated embedding cache payload: " + path_);
      std::vector<float> v(dim);
      for (std::uint32_t i = 0; i < dim; ++i)
        v[i] = std::bit_cast<float>(get_u32(p + pos + 4 * i));
      pos += 4ull * dim;
      entries_[std::move(key)] = std::move(v);
    }
  } else {
    if (std::filesystem::path(path_).has_parent_path())
      std::filesystem::create_directories(
          std::filesystem::path(path_).parent_path());
    std::FILE *f = std::fopen(path_.c_str(), "wb");
    if (!f || std::fwrite(kCacheMagic, 1, 8, f) != 8)
      throw Error("cannot create embedding cache: " + path_);
    std::fclose(f);
  }
  file_ = std::fopen(path_.c_str(), "ab");
  if (!file_)
    throw Error("cannot open embedding cache for append: " + path_);
}

EmbeddingCache::~EmbeddingCache() {
  if (file_)
    std::fclose(file_);
}

std::string EmbeddingCache::key(const std::string &encoder_id,
                                const std::string &input) {
  return sha256_hex(encoder_id + '\x1f' + input);
}

std::optional<std::vector<float>> EmbeddingCache::get(
    const std::string &key) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end())
    return std::nullopt;
  return it->second;
}

void EmbeddingCache::put(const std::string &key,
                         const std::vector<float> &vector) {
  std::lock_guard lock(mu_);
  if (!entries_.emplace(key, vector).second || !file_)
    return;
  std::string rec = key;
  put_u32(rec, static_cast<std::uint32_t>(vector.size()));
  for (float x: vector)
    put_u32(rec, std::bit_cast<std::uint32_t>(x));
  if (std::fwrite(rec.data(), 1, rec.size(), file_) != rec.size()
      || std::fflush(file_) != 0)
    throw Error("embedding cache write failed: " + path_);
}

size_t EmbeddingCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

Embedding encode_protein(const std::string &sequence, Encoder &encoder,
                         EmbeddingCache &cache) {
  const EncoderSpec &spec = encoder.spec();
  if (spec.modality != Modality::kProtein)
    throw ConfigError("encoder " + spec.encoder_id + " is not a protein encoder");
  if (!valid_sequence(sequence))
    throw FormatError("invalid protein sequence");
  const std::string key = EmbeddingCache::key(spec.encoder_id, sequence);
  if (auto hit = cache.get(key))
    return make_embedding(std::move(*hit), spec);
  auto v = encoder.encode_batch({sequence});
  check_vector(v.at(0), spec.dim, spec.encoder_id);
  cache.put(key, v[0]);
  return make_embedding(std::move(v[0]), spec);
}

std::vector<Embedding> encode_molecules(const std::vector<Molecule> &ms,
                                        Encoder &encoder,
                                        EmbeddingCache &cache) {
  const EncoderSpec &spec = encoder.spec();
  if (spec.modality != Modality::kMolecule)
    throw ConfigError("encoder " + spec.encoder_id
                      + " is not a molecule encoder");
  std::vector<Embedding> out(ms.size());
  std::vector<std::string> missing;
  std::unordered_map<std::string, size_t> first_missing;
  for (size_t i = 0; i < ms.size(); ++i) {
    const std::string key = EmbeddingCache::key(spec.encoder_id, ms[i].smiles());
    if (auto hit = cache.get(key)) {
      out[i] = make_embedding(std::move(*hit), spec);
    } else if (!first_missing.count(ms[i].smiles())) {
      first_missing[ms[i].smiles()] = missing.size();
      missing.push_back(ms[i].smiles());
    }
  }
  if (!missing.empty()) {
    auto vs = encoder.encode_batch(missing);
    if (vs.size() != missing.size())
      throw EncoderUnavailableError("encoder returned a short batch");
    for (size_t j = 0; j < vs.size(); ++j) {
      check_vector(vs[j], spec.dim, spec.encoder_id);
      cache.put(EmbeddingCache::key(spec.encoder_id, missing[j]), vs[j]);
    }
    for (size_t i = 0; i < ms.size(); ++i) {
      if (!out[i].vector.empty())
        continue;
      out[i] = make_embedding(vs[first_missing.at(ms[i].smiles())], spec);
    }
  }
  return out;
}

Embedding encode_molecule(const Molecule &m, Encoder &encoder,
                          EmbeddingCache &cache) {
  return std::move(encode_molecules({m}, encoder, cache).front());
}

}  // namespace rxngrow
