#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "internal.hpp"
#include "sentinel/csv.hpp"
#include "sentinel/error.hpp"

namespace sentinel {
namespace detail {

std::string read_token(std::istream& in) {
  std::string t;
  if (!(in >> t)) throw DataError("truncated model artifact");
  return t;
}

double read_double(std::istream& in) {
  std::string t = read_token(in);
  double v = 0.0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size()) throw DataError("bad number in model artifact: " + t);
  return v;
}

int read_int(std::istream& in) {
  std::string t = read_token(in);
  int v = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size()) throw DataError("bad integer in model artifact: " + t);
  return v;
}

void expect_token(std::istream& in, const std::string& expected) {
  std::string t = read_token(in);
  if (t != expected) throw DataError("model artifact: expected '" + expected + "', found '" + t + "'");
}

std::size_t read_size(std::istream& in, const std::string& key) {
  expect_token(in, key);
  std::string t = read_token(in);
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size()) throw DataError("bad count in model artifact: " + t);
  return v;
}

void write_doubles(std::ostream& out, const std::string& key, std::span<const double> values) {
  out << key << ' ' << values.size();
  for (double v : values) out << ' ' << csv::format_double(v);
  out << '\n';
}

std::vector<double> read_doubles(std::istream& in, const std::string& key) {
  std::size_t n = read_size(in, key);
  std::vector<double> v(n);
  for (auto& d : v) d = read_double(in);
  return v;
}

}  // namespace detail

namespace {
constexpr const char* kMagic = "reply-sentinel-model";
constexpr int kVersion = 1;
}  // namespace

void save_model(const TrainedModel& model, std::ostream& out) {
  out << kMagic << ' ' << kVersion << '\n';
  out << "kind " << to_string(model.kind()) << '\n';
  out << "seed " << model.seed() << '\n';
  detail::write_doubles(out, "threshold", std::vector<double>{model.threshold()});
  out << "features " << model.feature_names().size() << '\n';
  for (const auto& n : model.feature_names()) out << n << '\n';
  detail::write_doubles(out, "scaler_mean", model.scaler().mean);
  detail::write_doubles(out, "scaler_std", model.scaler().std);
  model.classifier().save(out);
  out << "end\n";
}

void save_model(const TrainedModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model: " + path);
  save_model(model, out);
  if (!out) throw DataError("failed writing model: " + path);
}

TrainedModel load_model(std::istream& in) {
  using namespace detail;
  std::string magic = read_token(in);
  if (magic != kMagic) throw DataError("not a model artifact");
  int version = read_int(in);
  if (version != kVersion) throw DataError("unsupported model artifact version " + std::to_string(version));
  expect_token(in, "kind");
  auto kind = parse_model_kind(read_token(in));
  if (!kind) throw DataError("unknown model kind in artifact");
  std::size_t seed = read_size(in, "seed");
  auto threshold = read_doubles(in, "threshold");
  if (threshold.size() != 1) throw DataError("bad threshold in model artifact");
  std::size_t nf = read_size(in, "features");
  std::vector<std::string> names(nf);
  in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
  // One name per line, so names may contain spaces.
  for (auto& n : names)
    if (!std::getline(in, n)) throw DataError("truncated model artifact");
  Scaler scaler;
  scaler.mean = read_doubles(in, "scaler_mean");
  scaler.std = read_doubles(in, "scaler_std");
  if (scaler.mean.size() != scaler.std.size() || (nf != 0 && nf != scaler.mean.size()))
    throw DataError("inconsistent feature schema in model artifact");
  auto impl = make_classifier(*kind);
  impl->load(in);
  expect_token(in, "end");
  return TrainedModel(*kind, std::move(names), std::move(scaler), std::shared_ptr<const Classifier>(std::move(impl)),
                      threshold[0], seed);
}

TrainedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model: " + path);
  return load_model(in);
}

}  // namespace sentinel
