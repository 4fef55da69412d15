#include "porogen/spgan.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace porogen::spgan {

namespace {

using nlohmann::json;
using porogen::ad::Activation;
using porogen::ad::Tensor;

constexpr double kLogFloor = 1e-12;
constexpr double kInitStd = 0.02;

// Stream layout for the per-run CounterRng: parameter init uses low
// streams, iteration i uses kIterStreamBase + 3*i + {0,1,2} for volume
// picks, origins and noise. Resuming at iteration i therefore replays the
// exact draws of an unbroken run.
constexpr std::uint64_t kIterStreamBase = 1ull << 32;

std::uint64_t iter_stream(std::int64_t iteration, int slot) {
  return kIterStreamBase + 3 * static_cast<std::uint64_t>(iteration) + slot;
}

Tensor clamped_log(const Tensor& x) {
  return ad::log(ad::clamp_min(x, kLogFloor));
}

double span_mean(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

void write_doubles_le(std::ofstream& out, std::span<const double> v) {
  static_assert(sizeof(double) == 8);
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * 8));
  } else {
    for (double d : v) {
      std::uint64_t bits;
      std::memcpy(&bits, &d, 8);
      char buf[8];
      for (int i = 0; i < 8; ++i) buf[i] = char((bits >> (8 * i)) & 0xff);
      out.write(buf, 8);
    }
  }
}

void read_doubles_le(const std::vector<char>& payload, std::size_t offset,
                     std::span<double> v) {
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(v.data(), payload.data() + offset * 8, v.size() * 8);
  } else {
    for (std::size_t j = 0; j < v.size(); ++j) {
      std::uint64_t bits = 0;
      for (int i = 7; i >= 0; --i)
        bits = (bits << 8) |
               std::uint8_t(payload[(offset + j) * 8 + i]);
      std::memcpy(&v[j], &bits, 8);
    }
  }
}

}  // namespace

int SpganConfig::levels() const {
  int l = 0;
  for (int s = volume_size; s > 4; s /= 2) ++l;
  return l;
}

void SpganConfig::validate() const {
  if (volume_size < 8 || (volume_size & (volume_size - 1)) != 0)
    throw std::invalid_argument(
        "config: volume_size must be a power of two >= 8");
  if (z_dim < 1) throw std::invalid_argument("config: z_dim must be >= 1");
  if (h_dim < 0) throw std::invalid_argument("config: h_dim must be >= 0");
  if (latent_dim() < 1)
    throw std::invalid_argument("config: latent dimension must be >= 1");
  if (latent_dim() >= volume_size * volume_size)
    throw std::invalid_argument(
        "config: latent dimension must be smaller than a slice");
  if (base_channels < 1)
    throw std::invalid_argument("config: base_channels must be >= 1");
  if (!(lr >= 0.0)) throw std::invalid_argument("config: lr must be >= 0");
  if (batch_size < 1)
    throw std::invalid_argument("config: batch_size must be >= 1");
  if (iterations < 0)
    throw std::invalid_argument("config: iterations must be >= 0");
}

std::string SpganConfig::to_json() const {
  json j;
  j["volume_size"] = volume_size;
  j["z_dim"] = z_dim;
  j["h_dim"] = h_dim;
  j["base_channels"] = base_channels;
  j["lr"] = lr;
  j["batch_size"] = batch_size;
  j["iterations"] = iterations;
  j["seed"] = seed;
  return j.dump(2) + "\n";
}

SpganConfig SpganConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: malformed JSON: ") +
                                e.what());
  }
  SpganConfig c;
  try {
    c.volume_size = j.value("volume_size", c.volume_size);
    c.z_dim = j.value("z_dim", c.z_dim);
    c.h_dim = j.value("h_dim", c.h_dim);
    c.base_channels = j.value("base_channels", c.base_channels);
    c.lr = j.value("lr", c.lr);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.iterations = j.value("iterations", c.iterations);
    c.seed = j.value("seed", c.seed);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: bad field: ") + e.what());
  }
  c.validate();
  return c;
}

ad::Tensor NoisePrior::sample(int n, CounterRng& rng) const {
  std::vector<double> z(static_cast<std::size_t>(n) * z_dim);
  for (auto& v : z) v = rng.next_normal();
  return Tensor::from({n, z_dim}, std::move(z));
}

std::string TrainLog::to_csv() const {
  std::string out = "iteration,ae_loss,d_loss,g_loss,d_real_mean,d_fake_mean\n";
  char buf[160];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  static_cast<long long>(r.iteration), r.ae_loss, r.d_loss,
                  r.g_loss, r.d_real_mean, r.d_fake_mean);
    out += buf;
  }
  return out;
}

void SpganModel::build_parameters(bool random_init) {
  const int L = config_.levels();
  const int bc = config_.base_channels;
  const int zd = config_.z_dim;
  const int hd = config_.latent_dim();
  const int core = 4;  // spatial extent of the dense core
  const int top_channels = bc << (L - 1);

  std::uint64_t stream = 1;
  auto make_param = [&](std::string id, ad::Shape shape, bool weights) {
    auto n = ad::shape_size(shape);
    std::vector<double> values(n, 0.0);
    if (random_init && weights) {
      CounterRng rng(config_.seed, stream);
      for (auto& v : values) v = kInitStd * rng.next_normal();
    }
    ++stream;
    return ad::Parameter{std::move(id),
                         Tensor::from(std::move(shape), std::move(values),
                                      /*requires_grad=*/true)};
  };

  encoder_.clear();
  generator_.clear();
  discriminator_.clear();

  for (int l = 0; l < L; ++l) {
    const int cin = l == 0 ? 1 : bc << (l - 1);
    const int cout = bc << l;
    encoder_.push_back(make_param("enc.conv" + std::to_string(l) + ".w",
                                  {cout, cin, 4, 4}, true));
    encoder_.push_back(make_param("enc.conv" + std::to_string(l) + ".b",
                                  {cout}, false));
  }
  encoder_.push_back(
      make_param("enc.fc.w", {hd, top_channels * core * core}, true));
  encoder_.push_back(make_param("enc.fc.b", {hd}, false));

  generator_.push_back(make_param(
      "gen.fc.w", {top_channels * core * core * core, zd + hd}, true));
  generator_.push_back(
      make_param("gen.fc.b", {top_channels * core * core * core}, false));
  for (int l = 0; l < L; ++l) {
    const int cin = top_channels >> l;
    const int cout = l == L - 1 ? 1 : top_channels >> (l + 1);
    generator_.push_back(make_param("gen.tconv" + std::to_string(l) + ".w",
                                    {cin, cout, 4, 4, 4}, true));
    generator_.push_back(make_param("gen.tconv" + std::to_string(l) + ".b",
                                    {cout}, false));
  }

  for (int l = 0; l < L; ++l) {
    const int cin = l == 0 ? 1 : bc << (l - 1);
    const int cout = bc << l;
    discriminator_.push_back(make_param(
        "disc.conv" + std::to_string(l) + ".w", {cout, cin, 4, 4, 4}, true));
    discriminator_.push_back(
        make_param("disc.conv" + std::to_string(l) + ".b", {cout}, false));
  }
  discriminator_.push_back(make_param(
      "disc.fc.w", {1, top_channels * core * core * core}, true));
  discriminator_.push_back(make_param("disc.fc.b", {1}, false));

  ad::AdamConfig adam_cfg;
  adam_cfg.lr = config_.lr;
  adam_encoder_ = ad::AdamState(encoder_, adam_cfg);
  adam_generator_ = ad::AdamState(generator_, adam_cfg);
  adam_discriminator_ = ad::AdamState(discriminator_, adam_cfg);
}

SpganModel SpganModel::initialize(const SpganConfig& config) {
  config.validate();
  SpganModel m;
  m.config_ = config;
  m.build_parameters(/*random_init=*/true);
  return m;
}

ad::Tensor SpganModel::encode(const ad::Tensor& slices) const {
  const int S = config_.volume_size;
  const auto& sh = slices.shape();
  if (sh.size() != 4 || sh[1] != 1 || sh[2] != S || sh[3] != S)
    throw std::invalid_argument("encode: expected slices [N,1," +
                                std::to_string(S) + "," + std::to_string(S) +
                                "], got " + ad::shape_str(sh));
  const int L = config_.levels();
  Tensor x = slices;
  std::size_t p = 0;
  for (int l = 0; l < L; ++l) {
    const Tensor& w = encoder_[p++].tensor;
    const Tensor& b = encoder_[p++].tensor;
    x = ad::activation(ad::conv2d(x, w, b, 2, 1), Activation::LeakyRelu, 0.2);
  }
  const auto& xs = x.shape();
  x = ad::reshape(x, {xs[0], xs[1] * xs[2] * xs[3]});
  const Tensor& fw = encoder_[p++].tensor;
  const Tensor& fb = encoder_[p++].tensor;
  return ad::dense(x, fw, fb);
}

ad::Tensor SpganModel::generate(const ad::Tensor& z,
                                const ad::Tensor& h) const {
  const auto& zs = z.shape();
  const auto& hs = h.shape();
  if (zs.size() != 2 || hs.size() != 2 || zs[0] != hs[0] ||
      zs[1] != config_.z_dim || hs[1] != config_.latent_dim())
    throw std::invalid_argument("generate: z/h dimension mismatch " +
                                ad::shape_str(zs) + " vs " +
                                ad::shape_str(hs));
  const int L = config_.levels();
  const int n = zs[0];
  const int top_channels = config_.base_channels << (L - 1);

  Tensor x = ad::concat(z, h, 1);
  std::size_t p = 0;
  const Tensor& fw = generator_[p++].tensor;
  const Tensor& fb = generator_[p++].tensor;
  x = ad::dense(x, fw, fb);
  x = ad::reshape(x, {n, top_channels, 4, 4, 4});
  x = ad::activation(x, Activation::Relu);
  for (int l = 0; l < L; ++l) {
    const Tensor& w = generator_[p++].tensor;
    const Tensor& b = generator_[p++].tensor;
    x = ad::conv_transpose3d(x, w, b, 2, 1);
    x = ad::activation(x, l == L - 1 ? Activation::Tanh : Activation::Relu);
  }
  return x;
}

ad::Tensor SpganModel::discriminate(const ad::Tensor& x_in) const {
  const int S = config_.volume_size;
  const auto& sh = x_in.shape();
  if (sh.size() != 5 || sh[1] != 1 || sh[2] != S || sh[3] != S || sh[4] != S)
    throw std::invalid_argument("discriminate: expected [N,1," +
                                std::to_string(S) + "^3], got " +
                                ad::shape_str(sh));
  const int L = config_.levels();
  Tensor x = x_in;
  std::size_t p = 0;
  for (int l = 0; l < L; ++l) {
    const Tensor& w = discriminator_[p++].tensor;
    const Tensor& b = discriminator_[p++].tensor;
    x = ad::activation(ad::conv3d(x, w, b, 2, 1), Activation::LeakyRelu, 0.2);
  }
  const auto& xs = x.shape();
  x = ad::reshape(x, {xs[0], xs[1] * xs[2] * xs[3] * xs[4]});
  const Tensor& fw = discriminator_[p++].tensor;
  const Tensor& fb = discriminator_[p++].tensor;
  x = ad::activation(ad::dense(x, fw, fb), Activation::Sigmoid);
  return ad::reshape(x, {xs[0]});
}

ad::Tensor SpganModel::ae_loss(const ad::Tensor& slices,
                               const ad::Tensor& z) const {
  if (slices.shape()[0] != z.shape()[0])
    throw std::invalid_argument("ae_loss: batch size mismatch");
  Tensor h = encode(slices);
  Tensor vol = generate(z, h);
  Tensor plane =
      ad::depth_plane(vol, central_slice_index(config_.volume_size));
  return ad::mse(plane, slices);
}

std::pair<ad::Tensor, ad::Tensor> SpganModel::gan_losses(
    const ad::Tensor& x_real, const ad::Tensor& slices,
    const ad::Tensor& z) const {
  if (x_real.shape()[0] != slices.shape()[0] ||
      slices.shape()[0] != z.shape()[0])
    throw std::invalid_argument("gan_losses: batch size mismatch");
  // h is treated as given in both GAN updates.
  Tensor h = encode(slices).detach();
  Tensor fake = generate(z, h);

  Tensor d_real = discriminate(x_real);
  Tensor d_fake_detached = discriminate(fake.detach());
  Tensor d_loss = ad::affine(
      ad::add(ad::mean(clamped_log(d_real)),
              ad::mean(clamped_log(ad::affine(d_fake_detached, -1.0, 1.0)))),
      -1.0, 0.0);
  Tensor g_loss =
      ad::mean(clamped_log(ad::affine(discriminate(fake), -1.0, 1.0)));
  return {d_loss, g_loss};
}

void SpganModel::zero_all_grads() {
  for (auto* net : {&encoder_, &generator_, &discriminator_})
    for (auto& p : *net) p.tensor.zero_grad();
}

TrainRecord SpganModel::train_iteration(const std::vector<VoxelVolume>& batch,
                                        std::int64_t iteration) {
  if (batch.empty())
    throw std::invalid_argument("train_iteration: empty batch");
  const int S = config_.volume_size;
  for (const auto& v : batch)
    if (v.dims() != Dims3{S, S, S})
      throw std::invalid_argument("train_iteration: batch volume size "
                                  "mismatch");

  std::vector<Slice2D> slices;
  slices.reserve(batch.size());
  for (const auto& v : batch) slices.push_back(central_slice(v));

  Tensor x = volumes_to_tensor(batch);
  Tensor s = slices_to_tensor(slices);
  CounterRng noise_rng(config_.seed, iter_stream(iteration, 2));
  NoisePrior prior{config_.z_dim};
  Tensor z = prior.sample(static_cast<int>(batch.size()), noise_rng);

  TrainRecord rec;
  rec.iteration = iteration;

  // encoder update on the reconstruction loss
  zero_all_grads();
  Tensor l_ae = ae_loss(s, z);
  ad::backward(l_ae);
  adam_encoder_.step(encoder_);
  rec.ae_loss = l_ae.item();

  // generator update on the reconstruction loss (fresh pass)
  zero_all_grads();
  ad::backward(ae_loss(s, z));
  adam_generator_.step(generator_);

  // discriminator update
  {
    zero_all_grads();
    Tensor h = encode(s).detach();
    Tensor fake = generate(z, h).detach();
    Tensor d_real = discriminate(x);
    Tensor d_fake = discriminate(fake);
    Tensor d_loss = ad::affine(
        ad::add(ad::mean(clamped_log(d_real)),
                ad::mean(clamped_log(ad::affine(d_fake, -1.0, 1.0)))),
        -1.0, 0.0);
    ad::backward(d_loss);
    adam_discriminator_.step(discriminator_);
    rec.d_loss = d_loss.item();
    rec.d_real_mean = span_mean(d_real.values());
    rec.d_fake_mean = span_mean(d_fake.values());
  }

  // generator update on the adversarial loss
  {
    zero_all_grads();
    Tensor h = encode(s).detach();
    Tensor fake = generate(z, h);
    Tensor g_loss =
        ad::mean(clamped_log(ad::affine(discriminate(fake), -1.0, 1.0)));
    ad::backward(g_loss);
    adam_generator_.step(generator_);
    rec.g_loss = g_loss.item();
  }

  ++iterations_done_;
  return rec;
}

ad::Tensor volumes_to_tensor(const std::vector<VoxelVolume>& batch) {
  if (batch.empty())
    throw std::invalid_argument("volumes_to_tensor: empty batch");
  const auto& d = batch.front().dims();
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(batch.size()) * d.count());
  for (const auto& v : batch) {
    if (v.dims() != d)
      throw std::invalid_argument("volumes_to_tensor: mixed dims");
    for (std::uint8_t b : v.data()) values.push_back(b ? 1.0 : -1.0);
  }
  return Tensor::from(
      {static_cast<int>(batch.size()), 1, d.nz, d.ny, d.nx},
      std::move(values));
}

ad::Tensor slices_to_tensor(const std::vector<Slice2D>& batch) {
  if (batch.empty())
    throw std::invalid_argument("slices_to_tensor: empty batch");
  const int nx = batch.front().nx, ny = batch.front().ny;
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(batch.size()) * nx * ny);
  for (const auto& s : batch) {
    if (s.nx != nx || s.ny != ny)
      throw std::invalid_argument("slices_to_tensor: mixed dims");
    for (std::uint8_t b : s.data) values.push_back(b ? 1.0 : -1.0);
  }
  return Tensor::from({static_cast<int>(batch.size()), 1, ny, nx},
                      std::move(values));
}

namespace {

std::vector<VoxelVolume> draw_batch(const std::vector<VoxelVolume>& corpus,
                                    const SpganConfig& config,
                                    std::int64_t iteration) {
  CounterRng pick(config.seed, iter_stream(iteration, 0));
  CounterRng origin_rng(config.seed, iter_stream(iteration, 1));
  std::vector<VoxelVolume> batch;
  batch.reserve(config.batch_size);
  for (int i = 0; i < config.batch_size; ++i) {
    const auto& vol = corpus[pick.next_below(corpus.size())];
    const auto origin =
        draw_subvolume_origin(vol, config.volume_size, origin_rng);
    batch.push_back(extract_subvolume(vol, origin, config.volume_size));
  }
  return batch;
}

}  // namespace

SpganModel resume_train(SpganModel model,
                        const std::vector<VoxelVolume>& corpus,
                        const TrainOptions& options, TrainLog* log) {
  const SpganConfig& config = model.config();
  if (corpus.empty()) throw std::invalid_argument("train: empty corpus");
  for (const auto& v : corpus)
    if (v.dims().min_extent() < config.volume_size)
      throw std::invalid_argument(
          "train: corpus volume smaller than volume_size");

  for (std::int64_t t = model.iterations_done(); t < config.iterations; ++t) {
    auto rec = model.train_iteration(draw_batch(corpus, config, t), t);
    if (log) log->records.push_back(rec);
    if (options.progress && (t % 25 == 0 || t + 1 == config.iterations)) {
      *options.progress << "iter " << t << " ae_loss " << rec.ae_loss
                        << " d_loss " << rec.d_loss << " g_loss "
                        << rec.g_loss << "\n";
    }
    if (options.checkpoint_every > 0 && !options.checkpoint_base.empty() &&
        (t + 1) % options.checkpoint_every == 0 &&
        t + 1 < config.iterations) {
      auto path = options.checkpoint_base;
      path += "_iter" + std::to_string(t + 1);
      model.save_checkpoint(path);
    }
  }
  if (!options.checkpoint_base.empty())
    model.save_checkpoint(options.checkpoint_base);
  return model;
}

SpganModel train(const std::vector<VoxelVolume>& corpus,
                 const SpganConfig& config, const TrainOptions& options,
                 TrainLog* log) {
  return resume_train(SpganModel::initialize(config), corpus, options, log);
}

std::vector<SynthesisSample> synthesize(const SpganModel& model,
                                        const Slice2D& slice, int count,
                                        std::uint64_t seed) {
  const int S = model.config().volume_size;
  if (slice.nx != S || slice.ny != S)
    throw std::invalid_argument("synthesize: slice edge must equal " +
                                std::to_string(S));
  if (count < 1) throw std::invalid_argument("synthesize: count must be >= 1");

  Tensor s = slices_to_tensor({slice});
  Tensor h = model.encode(s).detach();
  NoisePrior prior{model.config().z_dim};

  std::vector<SynthesisSample> out;
  out.reserve(count);
  for (int j = 0; j < count; ++j) {
    CounterRng rng(seed, static_cast<std::uint64_t>(j));
    Tensor z = prior.sample(1, rng);
    Tensor vol = model.generate(z, h);
    Tensor cube = ad::reshape(vol, {S, S, S});
    SynthesisSample sample{binarize(cube, 0.0), 0.0, 0.0};
    const Slice2D got = central_slice(sample.volume);
    std::int64_t ndiff = 0;
    for (std::size_t i = 0; i < got.data.size(); ++i)
      ndiff += got.data[i] != slice.data[i];
    sample.slice_mismatch =
        static_cast<double>(ndiff) / static_cast<double>(got.data.size());
    sample.slice_l2 = 2.0 * std::sqrt(static_cast<double>(ndiff));
    out.push_back(std::move(sample));
  }
  return out;
}

namespace {

json adam_to_json(const ad::AdamState& s) {
  return {{"t", s.t()},
          {"lr", s.config().lr},
          {"beta1", s.config().beta1},
          {"beta2", s.config().beta2},
          {"eps", s.config().eps}};
}

}  // namespace

void SpganModel::save_checkpoint(const std::filesystem::path& base) const {
  auto manifest_path = base;
  manifest_path += ".json";
  auto payload_path = base;
  payload_path += ".bin";
  if (base.has_parent_path())
    std::filesystem::create_directories(base.parent_path());

  json nets = json::object();
  std::int64_t offset = 0;  // in doubles

  auto tmp_payload = payload_path;
  tmp_payload += ".tmp";
  std::ofstream payload(tmp_payload, std::ios::binary | std::ios::trunc);
  if (!payload)
    throw CheckpointError("cannot write " + payload_path.string());

  const struct {
    const char* name;
    const std::vector<ad::Parameter>* params;
    const ad::AdamState* adam;
  } sections[] = {{"encoder", &encoder_, &adam_encoder_},
                  {"generator", &generator_, &adam_generator_},
                  {"discriminator", &discriminator_, &adam_discriminator_}};

  for (const auto& sec : sections) {
    json params = json::array();
    for (std::size_t i = 0; i < sec.params->size(); ++i) {
      const auto& p = (*sec.params)[i];
      json jp;
      jp["id"] = p.id;
      jp["shape"] = p.tensor.shape();
      jp["offset"] = offset;
      write_doubles_le(payload, p.tensor.values());
      offset += p.tensor.size();
      jp["m_offset"] = offset;
      write_doubles_le(payload, sec.adam->moments1()[i]);
      offset += p.tensor.size();
      jp["v_offset"] = offset;
      write_doubles_le(payload, sec.adam->moments2()[i]);
      offset += p.tensor.size();
      params.push_back(std::move(jp));
    }
    nets[sec.name] = {{"params", std::move(params)},
                      {"adam", adam_to_json(*sec.adam)}};
  }
  payload.close();
  if (!payload) throw CheckpointError("short write to " + payload_path.string());
  std::filesystem::rename(tmp_payload, payload_path);

  json manifest;
  manifest["format"] = "SPGAN-CKPT1";
  manifest["config"] = json::parse(config_.to_json());
  manifest["iterations_done"] = iterations_done_;
  manifest["payload_doubles"] = offset;
  manifest["networks"] = std::move(nets);
  const std::string text = manifest.dump(2) + "\n";

  auto tmp_manifest = manifest_path;
  tmp_manifest += ".tmp";
  {
    std::ofstream out(tmp_manifest, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot write " + manifest_path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
  }
  std::filesystem::rename(tmp_manifest, manifest_path);
}

SpganModel SpganModel::load_checkpoint(const std::filesystem::path& base) {
  auto manifest_path = base;
  manifest_path += ".json";
  auto payload_path = base;
  payload_path += ".bin";
  if (!std::filesystem::exists(manifest_path))
    throw CheckpointError("missing checkpoint manifest " +
                          manifest_path.string());
  if (!std::filesystem::exists(payload_path))
    throw CheckpointError("missing checkpoint payload " +
                          payload_path.string());

  std::ifstream min(manifest_path, std::ios::binary);
  std::string text((std::istreambuf_iterator<char>(min)),
                   std::istreambuf_iterator<char>());
  json manifest;
  try {
    manifest = json::parse(text);
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint manifest: ") +
                          e.what());
  }

  SpganModel model;
  try {
    if (manifest.at("format").get<std::string>() != "SPGAN-CKPT1")
      throw CheckpointError("unsupported checkpoint format");
    model.config_ = SpganConfig::from_json(manifest.at("config").dump());
    model.iterations_done_ = manifest.at("iterations_done").get<std::int64_t>();
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint manifest: ") +
                          e.what());
  }
  model.build_parameters(/*random_init=*/false);

  std::ifstream pin(payload_path, std::ios::binary);
  std::vector<char> payload((std::istreambuf_iterator<char>(pin)),
                            std::istreambuf_iterator<char>());
  const std::int64_t expected =
      manifest.value("payload_doubles", std::int64_t(-1));
  if (static_cast<std::int64_t>(payload.size()) != expected * 8)
    throw CheckpointError("checkpoint payload size mismatch in " +
                          payload_path.string());

  struct Sec {
    const char* name;
    std::vector<ad::Parameter>* params;
    ad::AdamState* adam;
  } sections[] = {{"encoder", &model.encoder_, &model.adam_encoder_},
                  {"generator", &model.generator_, &model.adam_generator_},
                  {"discriminator", &model.discriminator_,
                   &model.adam_discriminator_}};

  try {
    for (auto& sec : sections) {
      const json& jnet = manifest.at("networks").at(sec.name);
      const json& jparams = jnet.at("params");
      if (jparams.size() != sec.params->size())
        throw CheckpointError("checkpoint parameter count mismatch for " +
                              std::string(sec.name));
      std::vector<std::vector<double>> m, v;
      for (std::size_t i = 0; i < sec.params->size(); ++i) {
        auto& p = (*sec.params)[i];
        const json& jp = jparams[i];
        if (jp.at("id").get<std::string>() != p.id ||
            jp.at("shape").get<ad::Shape>() != p.tensor.shape())
          throw CheckpointError("checkpoint layout mismatch at parameter '" +
                                p.id + "'");
        const auto n = static_cast<std::size_t>(p.tensor.size());
        const auto off = jp.at("offset").get<std::int64_t>();
        const auto m_off = jp.at("m_offset").get<std::int64_t>();
        const auto v_off = jp.at("v_offset").get<std::int64_t>();
        if (off < 0 || v_off + static_cast<std::int64_t>(n) > expected)
          throw CheckpointError("checkpoint offsets out of range");
        read_doubles_le(payload, static_cast<std::size_t>(off),
                        p.tensor.values_mut());
        std::vector<double> mi(n), vi(n);
        read_doubles_le(payload, static_cast<std::size_t>(m_off), mi);
        read_doubles_le(payload, static_cast<std::size_t>(v_off), vi);
        m.push_back(std::move(mi));
        v.push_back(std::move(vi));
      }
      sec.adam->restore(std::move(m), std::move(v),
                        jnet.at("adam").at("t").get<std::int64_t>());
    }
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint manifest: ") +
                          e.what());
  }
  return model;
}

}  // namespace porogen::spgan
