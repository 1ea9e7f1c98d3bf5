#include <algorithm>
#include <cstring>
#include <fstream>

#include "sentinel/error.hpp"
#include "sentinel/similarity.hpp"

namespace sentinel {

// Record layout: u32 id length, id bytes, f64 value (host byte order; the
// files never outlive the process).
struct ReplierSampleAccumulator::Shard {
  std::filesystem::path path;
  std::ofstream out;
};

ReplierSampleAccumulator::ReplierSampleAccumulator(std::optional<std::filesystem::path> spill_dir, std::size_t shards)
    : spill_dir_(std::move(spill_dir)) {
  if (!spill_dir_) return;
  if (shards == 0) throw InvalidArgument("spill shard count must be positive");
  std::filesystem::create_directories(*spill_dir_);
  for (std::size_t i = 0; i < shards; ++i) {
    auto s = std::make_unique<Shard>();
    s->path = *spill_dir_ / ("replier_shard_" + std::to_string(i) + ".bin");
    s->out.open(s->path, std::ios::binary | std::ios::trunc);
    if (!s->out) throw DataError("cannot create spill file " + s->path.string());
    shards_.push_back(std::move(s));
  }
}

ReplierSampleAccumulator::~ReplierSampleAccumulator() {
  for (auto& s : shards_) {
    s->out.close();
    std::error_code ec;
    std::filesystem::remove(s->path, ec);
  }
}

void ReplierSampleAccumulator::add(const std::string& replier, double value) {
  ++total_;
  if (!spill_dir_) {
    memory_[replier].push_back(value);
    return;
  }
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : replier) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  Shard& s = *shards_[h % shards_.size()];
  auto len = static_cast<std::uint32_t>(replier.size());
  s.out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  s.out.write(replier.data(), len);
  s.out.write(reinterpret_cast<const char*>(&value), sizeof(value));
}

void ReplierSampleAccumulator::consume(const PostPairs& block, const std::set<std::string>& scope) {
  if (!scope.empty() && !scope.contains(block.poster_tweetid)) return;
  for (const auto& p : block.pairs) {
    const auto& x = block.replies[p.x].replier_id;
    const auto& y = block.replies[p.y].replier_id;
    if (x == y) continue;
    add(x, p.cosine);
    add(y, p.cosine);
  }
}

void ReplierSampleAccumulator::for_each(const std::function<void(const std::string&, std::vector<double>&)>& visit) {
  if (!spill_dir_) {
    for (auto& [id, values] : memory_) {
      std::sort(values.begin(), values.end());
      visit(id, values);
    }
    return;
  }
  for (auto& s : shards_) {
    s->out.flush();
    std::ifstream in(s->path, std::ios::binary);
    std::map<std::string, std::vector<double>> grouped;
    std::uint32_t len = 0;
    std::string id;
    double value = 0;
    while (in.read(reinterpret_cast<char*>(&len), sizeof(len))) {
      id.resize(len);
      in.read(id.data(), len);
      in.read(reinterpret_cast<char*>(&value), sizeof(value));
      if (!in) throw DataError("truncated spill file " + s->path.string());
      grouped[id].push_back(value);
    }
    for (auto& [rid, values] : grouped) {
      std::sort(values.begin(), values.end());
      visit(rid, values);
    }
  }
}

}  // namespace sentinel
