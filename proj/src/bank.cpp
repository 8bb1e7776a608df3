#include "corf/bank.hpp"

#include <cmath>
#include <cstring>
#include <numbers>

#include <nlohmann/json.hpp>

#include "corf/detail/engine.hpp"
#include "corf/io_util.hpp"
#include "corf/parallel.hpp"

namespace corf {

void BetaPolicy::validate() const {
  if (!(value >= 0.0)) throw InvalidArgument("beta policy value must be >= 0");
}

std::vector<double> default_sigmas() {
  std::vector<double> sigmas;
  for (int i = 0; i <= 16; ++i) sigmas.push_back(1.0 + 0.25 * i);
  return sigmas;
}

std::vector<double> default_orientations() {
  std::vector<double> orientations;
  for (int i = 0; i < 12; ++i) orientations.push_back(i * (std::numbers::pi / 6.0));
  return orientations;
}

namespace {

void validate_bank_params(const std::vector<double>& sigmas,
                          const std::vector<double>& orientations) {
  if (sigmas.empty()) throw InvalidArgument("bank needs at least one sigma");
  double prev = 0.0;
  for (double s : sigmas) {
    if (!(s > 0.0) || s <= prev)
      throw InvalidArgument("sigmas must be positive and strictly increasing");
    prev = s;
  }
  if (orientations.empty()) throw InvalidArgument("bank needs at least one orientation");
  double prev_o = -1.0;
  for (double o : orientations) {
    if (!(o >= 0.0) || o >= 2.0 * std::numbers::pi || o <= prev_o)
      throw InvalidArgument("orientations must be strictly increasing in [0, 2*pi)");
    prev_o = o;
  }
}

}  // namespace

FilterBank build_bank(const std::vector<double>& sigmas,
                      const std::vector<double>& orientations, double k,
                      const BetaPolicy& beta, const GeometryPolicy& geometry) {
  validate_bank_params(sigmas, orientations);
  if (!(k >= 0.0)) throw InvalidArgument("k must be >= 0");
  beta.validate();
  geometry.validate();

  FilterBank bank;
  bank.sigmas = sigmas;
  bank.orientations = orientations;
  bank.k = k;
  bank.beta = beta;
  bank.geometry = geometry;
  bank.cells.reserve(sigmas.size());
  for (double sigma : sigmas) {
    try {
      const CorfCell push = configure(sigma, geometry);
      bank.cells.push_back(make_pushpull(push, beta.beta_for(sigma), k, geometry));
    } catch (const Error& e) {
      throw ConfigError("bank configuration failed at sigma " + std::to_string(sigma) +
                        ": " + e.what());
    }
  }
  return bank;
}

FilterBank build_default_bank() {
  return build_bank(default_sigmas(), default_orientations(), 1.8, BetaPolicy{});
}

FeatureTensor apply_bank(const Image& image, const FilterBank& bank, int threads) {
  if (bank.cells.size() != bank.sigmas.size())
    throw InvalidArgument("bank has no configured cells");

  FeatureTensor tensor;
  tensor.height = image.height();
  tensor.width = image.width();
  tensor.channels.resize(bank.cells.size());

  parallel_for(static_cast<int>(bank.cells.size()), threads, [&](int c) {
    const PushPullCell& cell = bank.cells[c];
    const int pad =
        std::max(detail::required_pad(cell.push), detail::required_pad(cell.pull));
    detail::CellContext ctx(image, cell.push.source_sigma, pad,
                            bank.geometry.truncation);
    ResponseMap channel;
    for (std::size_t o = 0; o < bank.orientations.size(); ++o) {
      const double psi = bank.orientations[o];
      const ResponseMap push = detail::eval_cell(ctx, rotate_set(cell.push, psi));
      const ResponseMap pull = detail::eval_cell(ctx, rotate_set(cell.pull, psi));
      const ResponseMap response = (push - cell.k * pull).max(0.0);
      channel = o == 0 ? response : channel.max(response).eval();
    }
    tensor.channels[c] = channel.cast<float>();
  });
  return tensor;
}

Eigen::VectorXd flatten(const FeatureTensor& tensor) {
  const long plane = static_cast<long>(tensor.height) * tensor.width;
  Eigen::VectorXd out(plane * tensor.channel_count());
  for (int c = 0; c < tensor.channel_count(); ++c) {
    const PlaneF& ch = tensor.channels[c];
    for (long i = 0; i < plane; ++i)
      out(static_cast<long>(c) * plane + i) =
          static_cast<double>(ch(i / tensor.width, i % tensor.width));
  }
  return out;
}

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const std::string& in, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  return v;
}

}  // namespace

std::string tensor_to_bytes(const FeatureTensor& tensor) {
  std::string out = "CORF";
  put_u32(out, 1);
  put_u32(out, static_cast<std::uint32_t>(tensor.height));
  put_u32(out, static_cast<std::uint32_t>(tensor.width));
  put_u32(out, static_cast<std::uint32_t>(tensor.channel_count()));
  for (const PlaneF& ch : tensor.channels) {
    if (ch.rows() != tensor.height || ch.cols() != tensor.width)
      throw DimensionError("tensor channel dimensions disagree");
    for (long y = 0; y < ch.rows(); ++y)
      for (long x = 0; x < ch.cols(); ++x) {
        std::uint32_t bits;
        const float v = ch(y, x);
        std::memcpy(&bits, &v, sizeof bits);
        put_u32(out, bits);
      }
  }
  return out;
}

FeatureTensor tensor_from_bytes(const std::string& bytes) {
  if (bytes.size() < 20 || bytes.compare(0, 4, "CORF") != 0)
    throw FormatError("not a CORF tensor (bad magic)");
  const std::uint32_t version = get_u32(bytes, 4);
  if (version != 1)
    throw FormatError("unsupported tensor version " + std::to_string(version));
  FeatureTensor tensor;
  tensor.height = static_cast<int>(get_u32(bytes, 8));
  tensor.width = static_cast<int>(get_u32(bytes, 12));
  const std::uint32_t channels = get_u32(bytes, 16);
  constexpr std::uint32_t kDimLimit = 1u << 20;
  if (tensor.height < 1 || tensor.width < 1 || channels < 1 ||
      tensor.height > static_cast<int>(kDimLimit) ||
      tensor.width > static_cast<int>(kDimLimit) || channels > kDimLimit)
    throw FormatError("bad tensor dimensions");
  const std::size_t plane = static_cast<std::size_t>(tensor.height) * tensor.width;
  if (bytes.size() != 20 + 4 * plane * channels)
    throw FormatError("tensor payload size mismatch");
  std::size_t pos = 20;
  for (std::uint32_t c = 0; c < channels; ++c) {
    PlaneF ch(tensor.height, tensor.width);
    for (long y = 0; y < ch.rows(); ++y)
      for (long x = 0; x < ch.cols(); ++x) {
        const std::uint32_t bits = get_u32(bytes, pos);
        float v;
        std::memcpy(&v, &bits, sizeof v);
        ch(y, x) = v;
        pos += 4;
      }
    if (!ch.isFinite().all() || (ch < 0.0f).any())
      throw FormatError("tensor payload holds non-finite or negative values");
    tensor.channels.push_back(std::move(ch));
  }
  return tensor;
}

void export_tensor(const FeatureTensor& tensor, const std::string& path) {
  write_file_atomic(path, tensor_to_bytes(tensor));
}

FeatureTensor import_tensor(const std::string& path) {
  return tensor_from_bytes(read_file(path));
}

std::string bank_to_json(const FilterBank& bank) {
  nlohmann::json j;
  j["sigmas"] = bank.sigmas;
  j["orientations"] = bank.orientations;
  j["k"] = bank.k;
  j["beta_policy"] = {
      {"mode", bank.beta.mode == BetaPolicy::Mode::SigmaProportional ? "sigma" : "fixed"},
      {"value", bank.beta.value}};
  j["geometry"] = {{"radius_factors", bank.geometry.radius_factors},
                   {"sigma0_factor", bank.geometry.sigma0_factor},
                   {"alpha", bank.geometry.alpha},
                   {"maxima_threshold", bank.geometry.maxima_threshold},
                   {"nms_window_deg", bank.geometry.nms_window_deg},
                   {"weight_sigma_factor", bank.geometry.weight_sigma_factor},
                   {"truncation", bank.geometry.truncation}};
  j["cells"] = nlohmann::json::array();
  for (const auto& cell : bank.cells)
    j["cells"].push_back(nlohmann::json::parse(pushpull_to_json(cell)));
  return j.dump(2) + "\n";
}

FilterBank bank_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad bank JSON: ") + e.what());
  }
  FilterBank bank;
  try {
    bank.sigmas = j.at("sigmas").get<std::vector<double>>();
    bank.orientations = j.at("orientations").get<std::vector<double>>();
    bank.k = j.at("k").get<double>();
    const auto& jb = j.at("beta_policy");
    bank.beta.mode = jb.at("mode").get<std::string>() == "sigma"
                         ? BetaPolicy::Mode::SigmaProportional
                         : BetaPolicy::Mode::Fixed;
    bank.beta.value = jb.at("value").get<double>();
    const auto& jg = j.at("geometry");
    bank.geometry.radius_factors = jg.at("radius_factors").get<std::vector<double>>();
    bank.geometry.sigma0_factor = jg.at("sigma0_factor").get<double>();
    bank.geometry.alpha = jg.at("alpha").get<double>();
    bank.geometry.maxima_threshold = jg.at("maxima_threshold").get<double>();
    bank.geometry.nms_window_deg = jg.at("nms_window_deg").get<double>();
    bank.geometry.weight_sigma_factor = jg.at("weight_sigma_factor").get<double>();
    bank.geometry.truncation = jg.at("truncation").get<double>();
    for (const auto& jc : j.at("cells"))
      bank.cells.push_back(pushpull_from_json(jc.dump()));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad bank JSON: ") + e.what());
  }
  validate_bank_params(bank.sigmas, bank.orientations);
  if (bank.cells.size() != bank.sigmas.size())
    throw FormatError("bank JSON must carry one cell per sigma");
  return bank;
}

}  // namespace corf
