//
// SPDX-License-Identifier: Apache-2.0
//

#ifndef RXNGROW_ENCODERS_H_
#define RXNGROW_ENCODERS_H_

#include <cstdio>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rxngrow/chem_core.h"

namespace rxngrow {

inline constexpr int kProteinDim = 1280;
inline constexpr int kMoleculeDim = 768;

enum class Modality { kProtein, kMolecule };

struct EncoderSpec {
  std::string encoder_id;
  Modality modality = Modality::kMolecule;
  int dim = kMoleculeDim;

  static EncoderSpec protein(std::string id, int dim = kProteinDim) {
    return {std::move(id), Modality::kProtein, dim};
  }
  static EncoderSpec molecule(std::string id, int dim = kMoleculeDim) {
    return {std::move(id), Modality::kMolecule, dim};
  }
};

struct Embedding {
  std::vector<float> vector;
  int dim = 0;
  std::string encoder_id;

  bool operator==(const Embedding &) const = default;
};

class Encoder {
public:
  virtual ~Encoder() = default;
  virtual const EncoderSpec &spec() const = 0;
  // One vector of spec().dim per input, same order. Throws
  // EncoderUnavailableError.
  virtual std::vector<std::vector<float>> encode_batch(
      const std::vector<std::string> &inputs) = 0;
};

// Deterministic stand-in for a pretrained model: the SHA-256 of
// (encoder_id, input) as a +-1 vector, multiplied by a Gaussian matrix
// seeded from encoder_id, then L2-normalized.
class StubEncoder: public Encoder {
public:
  explicit StubEncoder(EncoderSpec spec);

  const EncoderSpec &spec() const override { return spec_; }
  std::vector<std::vector<float>> encode_batch(
      const std::vector<std::string> &inputs) override;
  std::vector<float> encode_one(const std::string &input) const;

private:
  EncoderSpec spec_;
  std::vector<double> projection_;  // dim x 256, row major
};

// Adapter for an external model process. The command is run with two extra
// arguments, the request and response paths. The request holds one input
// per line; the response must hold one whitespace-separated vector per
// line in the same order.
class BatchFileEncoder: public Encoder {
public:
  BatchFileEncoder(EncoderSpec spec, std::vector<std::string> command,
                   std::string work_dir);

  const EncoderSpec &spec() const override { return spec_; }
  std::vector<std::vector<float>> encode_batch(
      const std::vector<std::string> &inputs) override;

private:
  EncoderSpec spec_;
  std::vector<std::string> command_;
  std::string work_dir_;
  int calls_ = 0;
};

// Persistent map from key to vector. The file is a sequence of records
// (64 hex key chars, uint32 dim, dim float32), all little-endian, after an
// 8-byte magic. Lookups may run concurrently; inserts take a lock and
// append to the file.
class EmbeddingCache {
public:
  // In-memory only.
  EmbeddingCache() = default;
  // Loads path if it exists and appends new entries to it. Throws
  // FormatError for a corrupt file.
  explicit EmbeddingCache(std::string path);
  ~EmbeddingCache();
  EmbeddingCache(const EmbeddingCache &) = delete;
  EmbeddingCache &operator=(const EmbeddingCache &) = delete;

  static std::string key(const std::string &encoder_id,
                         const std::string &input);

  std::optional<std::vector<float>> get(const std::string &key) const;
  void put(const std::string &key, const std::vector<float> &vector);
  size_t size() const;
  const std::string &path() const { return path_; }

private:
  std::string path_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, std::vector<float>> entries_;
  std::FILE *file_ = nullptr;
};

// Throws ConfigError on a modality mismatch, FormatError for an invalid
// sequence, EncoderUnavailableError from the encoder.
Embedding encode_protein(const std::string &sequence, Encoder &encoder,
                         EmbeddingCache &cache);
Embedding encode_molecule(const Molecule &m, Encoder &encoder,
                          EmbeddingCache &cache);
// Only cache misses reach the encoder, in one batch. Output order follows
// the input.
std::vector<Embedding> encode_molecules(const std::vector<Molecule> &ms,
                                        Encoder &encoder,
                                        EmbeddingCache &cache);

}  // namespace rxngrow

#endif  // RXNGROW_ENCODERS_H_
