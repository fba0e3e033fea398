#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "cifd/core/rng.hpp"
#include "cifd/dct.hpp"
#include "cifd/image.hpp"
#include "cifd/synth.hpp"

namespace cifd {

struct ManifestEntry {
  int id = 0;
  std::string hq;    // path of the high-quality member, relative to the manifest
  std::string lq;    // low-quality member
  std::string mask;  // shared ground-truth mask (all zeros for real pairs)
  bool fake = false;
  bool flip = false;  // augmentation flag used by oversampled replicas
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::vector<int> train, val, test;  // disjoint pair-id lists
  std::uint64_t seed = 0;

  const ManifestEntry& by_id(int id) const {
    for (const auto& e : entries)
      if (e.id == id) return e;
    throw std::out_of_range("manifest: unknown pair id " + std::to_string(id));
  }
};

struct GenConfig {
  int count = 100;
  int size = 32;
  int hqQuality = 90;
  int lqQuality = 30;
  // optional second HQ quality for mixed-pair manifests; 0 disables
  int hqQualityMix = 0;
  double mixFraction = 0.5;
  double fakeFraction = 0.5;
  double trainFrac = 0.7;
  double valFrac = 0.15;
  std::uint64_t seed = 0;
};

inline nlohmann::json manifest_to_json(const DatasetManifest& m) {
  nlohmann::json j;
  j["entries"] = nlohmann::json::array();
  for (const auto& e : m.entries) {
    nlohmann::json je = {{"id", e.id},
                         {"hq", e.hq},
                         {"lq", e.lq},
                         {"mask", e.mask},
                         {"label", e.fake ? "fake" : "real"}};
    if (e.flip) je["flip"] = true;
    j["entries"].push_back(je);
  }
  j["splits"] = {{"train", m.train}, {"val", m.val}, {"test", m.test}};
  j["seed"] = m.seed;
  return j;
}

inline DatasetManifest manifest_from_json(const nlohmann::json& j) {
  DatasetManifest m;
  for (const auto& je : j.at("entries")) {
    ManifestEntry e;
    e.id = je.at("id").get<int>();
    e.hq = je.at("hq").get<std::string>();
    e.lq = je.at("lq").get<std::string>();
    e.mask = je.at("mask").get<std::string>();
    e.fake = je.at("label").get<std::string>() == "fake";
    e.flip = je.value("flip", false);
    m.entries.push_back(e);
  }
  m.train = j.at("splits").at("train").get<std::vector<int>>();
  m.val = j.at("splits").at("val").get<std::vector<int>>();
  m.test = j.at("splits").at("test").get<std::vector<int>>();
  m.seed = j.at("seed").get<std::uint64_t>();
  return m;
}

inline void save_manifest(const DatasetManifest& m, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << manifest_to_json(m).dump(2) << "\n";
}

inline DatasetManifest load_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  nlohmann::json j;
  f >> j;
  return manifest_from_json(j);
}

// Generates real/fake pairs, compresses each source at both qualities, and
// writes everything under outDir (images/, masks/, manifest.json). The HQ
// and LQ members of a pair come from the same source image, so the mask is
// shared and identical across compression levels by construction.
inline DatasetManifest make_paired_dataset(const GenConfig& cfg,
                                           const std::string& outDir) {
  if (cfg.hqQuality <= cfg.lqQuality)
    throw std::invalid_argument(
        "make_paired_dataset: hq quality must exceed lq quality");
  if (cfg.hqQualityMix != 0 && cfg.hqQualityMix <= cfg.lqQuality)
    throw std::invalid_argument(
        "make_paired_dataset: mixed hq quality must exceed lq quality");
  if (cfg.count <= 0) throw std::invalid_argument("make_paired_dataset: count <= 0");
  if (cfg.trainFrac < 0 || cfg.valFrac < 0 || cfg.trainFrac + cfg.valFrac > 1.0)
    throw std::invalid_argument("make_paired_dataset: bad split fractions");
  require_generatable_size(cfg.size);

  namespace fs = std::filesystem;
  fs::create_directories(fs::path(outDir) / "images");
  fs::create_directories(fs::path(outDir) / "masks");

  const int nFake = static_cast<int>(std::lround(cfg.count * cfg.fakeFraction));
  DatasetManifest manifest;
  manifest.seed = cfg.seed;

  for (int i = 0; i < cfg.count; ++i) {
    const std::uint64_t sampleSeed = derive_seed(cfg.seed, std::uint64_t(i));
    const bool fake = i < nFake;

    Image source;
    Mask mask(cfg.size, cfg.size);
    if (fake) {
      auto [img, m] = generate_fake_pair(derive_seed(sampleSeed, 1),
                                         derive_seed(sampleSeed, 2), cfg.size);
      source = std::move(img);
      mask = std::move(m);
    } else {
      source = generate_real_image(derive_seed(sampleSeed, 1), cfg.size);
    }

    int hqQuality = cfg.hqQuality;
    if (cfg.hqQualityMix != 0) {
      Rng mixRng(derive_seed(sampleSeed, 3));
      if (mixRng.chance(cfg.mixFraction)) hqQuality = cfg.hqQualityMix;
    }
    const Image hq = compress(source, CompressionLevel{hqQuality});
    const Image lq = compress(source, CompressionLevel{cfg.lqQuality});

    char name[32];
    std::snprintf(name, sizeof name, "pair%05d", i);
    ManifestEntry e;
    e.id = i;
    e.fake = fake;
    e.hq = std::string("images/") + name + "_hq.ppm";
    e.lq = std::string("images/") + name + "_lq.ppm";
    e.mask = std::string("masks/") + name + "_mask.pgm";
    write_ppm((fs::path(outDir) / e.hq).string(), hq);
    write_ppm((fs::path(outDir) / e.lq).string(), lq);
    write_pgm((fs::path(outDir) / e.mask).string(), mask_to_gray(mask));
    manifest.entries.push_back(e);
  }

  // Stratified split: fakes and reals are shuffled separately and sliced, so
  // every split keeps the configured class ratio.
  Rng splitRng(derive_seed(cfg.seed, 0x9017));
  std::vector<int> fakes, reals;
  for (const auto& e : manifest.entries) (e.fake ? fakes : reals).push_back(e.id);
  for (auto* ids : {&fakes, &reals})
    for (std::size_t k = ids->size(); k > 1; --k)
      std::swap((*ids)[k - 1], (*ids)[splitRng.below(k)]);

  auto slice = [&](const std::vector<int>& ids) {
    const int nTrain = static_cast<int>(std::lround(ids.size() * cfg.trainFrac));
    const int nVal = static_cast<int>(std::lround(ids.size() * cfg.valFrac));
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (k < std::size_t(nTrain))
        manifest.train.push_back(ids[k]);
      else if (k < std::size_t(nTrain + nVal))
        manifest.val.push_back(ids[k]);
      else
        manifest.test.push_back(ids[k]);
    }
  };
  slice(fakes);
  slice(reals);
  std::sort(manifest.train.begin(), manifest.train.end());
  std::sort(manifest.val.begin(), manifest.val.end());
  std::sort(manifest.test.begin(), manifest.test.end());

  save_manifest(manifest, (fs::path(outDir) / "manifest.json").string());
  return manifest;
}

// Oversamples the minority class by replication until the real:fake ratio is
// inside [0.95, 1.05]; replicas alternate a horizontal-flip flag.
inline std::vector<ManifestEntry> balance_entries(
    const std::vector<ManifestEntry>& entries) {
  std::vector<const ManifestEntry*> reals, fakes;
  for (const auto& e : entries) (e.fake ? fakes : reals).push_back(&e);
  if (reals.empty() || fakes.empty())
    throw std::runtime_error("balance_entries: a class is empty");

  std::vector<ManifestEntry> out = entries;
  const auto& minority = reals.size() < fakes.size() ? reals : fakes;
  const std::size_t extra =
      std::max(reals.size(), fakes.size()) - minority.size();
  for (std::size_t k = 0; k < extra; ++k) {
    ManifestEntry copy = *minority[k % minority.size()];
    copy.flip = ((k / minority.size()) % 2 == 0);
    out.push_back(copy);
  }
  return out;
}

inline DatasetManifest balance_classes(const DatasetManifest& manifest) {
  DatasetManifest out = manifest;
  out.entries = balance_entries(manifest.entries);
  return out;
}

// In-memory pair used by training and evaluation.
struct LoadedPair {
  int id = 0;
  bool fake = false;
  bool flip = false;
  Image hq, lq;
  Mask mask;
};

inline std::vector<LoadedPair> load_pairs(const std::string& dataDir,
                                          const DatasetManifest& manifest,
                                          const std::vector<ManifestEntry>& entries) {
  namespace fs = std::filesystem;
  (void)manifest;
  std::vector<LoadedPair> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    LoadedPair p;
    p.id = e.id;
    p.fake = e.fake;
    p.flip = e.flip;
    p.hq = read_ppm((fs::path(dataDir) / e.hq).string());
    p.lq = read_ppm((fs::path(dataDir) / e.lq).string());
    p.mask = binarize_mask(read_pgm((fs::path(dataDir) / e.mask).string()));
    out.push_back(std::move(p));
  }
  return out;
}

inline std::vector<ManifestEntry> entries_for_ids(const DatasetManifest& manifest,
                                                  const std::vector<int>& ids) {
  std::unordered_map<int, const ManifestEntry*> index;
  for (const auto& e : manifest.entries) index[e.id] = &e;
  std::vector<ManifestEntry> out;
  out.reserve(ids.size());
  for (int id : ids) {
    auto it = index.find(id);
    if (it == index.end())
      throw std::out_of_range("manifest: unknown pair id " + std::to_string(id));
    out.push_back(*it->second);
  }
  return out;
}

}  // namespace cifd
