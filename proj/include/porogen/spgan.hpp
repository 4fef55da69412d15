#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "porogen/adam.hpp"
#include "porogen/layers.hpp"
#include "porogen/tensor.hpp"
#include "porogen/volume.hpp"

namespace porogen::spgan {

struct SpganConfig {
  int volume_size = 32;   // cubic edge, power of two >= 8
  int z_dim = 64;         // noise dimension
  int h_dim = 0;          // slice-latent dimension; 0 means "same as z_dim"
  int base_channels = 16; // width multiplier
  double lr = 0.0001;
  int batch_size = 4;
  std::int64_t iterations = 0;
  std::uint64_t seed = 0;

  int latent_dim() const { return h_dim > 0 ? h_dim : z_dim; }
  // Number of stride-2 stages between the 4^d core and volume_size.
  int levels() const;
  void validate() const;

  std::string to_json() const;
  static SpganConfig from_json(const std::string& text);
  friend bool operator==(const SpganConfig&, const SpganConfig&) = default;
};

// Standard-normal noise prior of dimension z_dim.
struct NoisePrior {
  int z_dim = 0;
  ad::Tensor sample(int n, CounterRng& rng) const;
};

struct TrainRecord {
  std::int64_t iteration = 0;
  double ae_loss = 0.0;
  double d_loss = 0.0;
  double g_loss = 0.0;
  double d_real_mean = 0.0;
  double d_fake_mean = 0.0;
};

struct TrainLog {
  std::vector<TrainRecord> records;
  std::string to_csv() const;
};

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Encoder E_tau, generator G_theta, discriminator D_phi plus one Adam
// state per network.
class SpganModel {
 public:
  static SpganModel initialize(const SpganConfig& config);

  const SpganConfig& config() const { return config_; }
  std::int64_t iterations_done() const { return iterations_done_; }

  std::vector<ad::Parameter>& encoder_params() { return encoder_; }
  std::vector<ad::Parameter>& generator_params() { return generator_; }
  std::vector<ad::Parameter>& discriminator_params() { return discriminator_; }
  const std::vector<ad::Parameter>& encoder_params() const { return encoder_; }
  const std::vector<ad::Parameter>& generator_params() const {
    return generator_;
  }
  const std::vector<ad::Parameter>& discriminator_params() const {
    return discriminator_;
  }
  ad::AdamState& encoder_adam() { return adam_encoder_; }
  ad::AdamState& generator_adam() { return adam_generator_; }
  ad::AdamState& discriminator_adam() { return adam_discriminator_; }

  // slices [N,1,S,S] -> latent [N,h_dim]
  ad::Tensor encode(const ad::Tensor& slices) const;
  // z [N,z_dim], h [N,h_dim] -> volume [N,1,S,S,S] in (-1,1)
  ad::Tensor generate(const ad::Tensor& z, const ad::Tensor& h) const;
  // x [N,1,S,S,S] -> realness [N] in (0,1)
  ad::Tensor discriminate(const ad::Tensor& x) const;

  // || s - M (.) G(E(s), z) ||^2 as a per-element mean, slices in +/-1
  // encoding; gradients reach the generator only through the central plane.
  ad::Tensor ae_loss(const ad::Tensor& slices, const ad::Tensor& z) const;
  // (d_loss, g_loss): d_loss = -(mean log D(x) + mean log(1 - D(fake)))
  // with the fake detached; g_loss = mean log(1 - D(fake)) with gradients
  // flowing into the generator. Logs are clamped at 1e-12.
  std::pair<ad::Tensor, ad::Tensor> gan_losses(const ad::Tensor& x_real,
                                               const ad::Tensor& slices,
                                               const ad::Tensor& z) const;

  // One pass of the five-step schedule: slices from the mask, one noise
  // minibatch, then Adam updates of tau and theta on the reconstruction
  // loss, of phi on d_loss, and of theta on g_loss, each from a fresh
  // forward pass with the other networks held fixed.
  TrainRecord train_iteration(const std::vector<VoxelVolume>& batch,
                              std::int64_t iteration);

  void zero_all_grads();

  void save_checkpoint(const std::filesystem::path& base) const;
  static SpganModel load_checkpoint(const std::filesystem::path& base);

 private:
  SpganModel() = default;
  void build_parameters(bool random_init);

  SpganConfig config_;
  std::int64_t iterations_done_ = 0;
  std::vector<ad::Parameter> encoder_, generator_, discriminator_;
  ad::AdamState adam_encoder_, adam_generator_, adam_discriminator_;
};

struct TrainOptions {
  std::int64_t checkpoint_every = 0;  // 0: no intermediate checkpoints
  std::filesystem::path checkpoint_base;  // empty: never write
  std::ostream* progress = nullptr;
};

// Runs train_iteration up to config.iterations, drawing each batch as
// random subvolumes of corpus volumes (volume choice and origins seeded per
// iteration, so resuming from a checkpoint replays the identical stream).
SpganModel train(const std::vector<VoxelVolume>& corpus,
                 const SpganConfig& config, const TrainOptions& options,
                 TrainLog* log);
SpganModel resume_train(SpganModel model,
                        const std::vector<VoxelVolume>& corpus,
                        const TrainOptions& options, TrainLog* log);

struct SynthesisSample {
  VoxelVolume volume;
  double slice_l2 = 0.0;        // +/-1 encoding distance to the input slice
  double slice_mismatch = 0.0;  // fraction of differing pixels
};

std::vector<SynthesisSample> synthesize(const SpganModel& model,
                                        const Slice2D& slice, int count,
                                        std::uint64_t seed);

// +/-1 phase encoding used at the network boundary: SOLID -> +1, VOID -> -1.
ad::Tensor volumes_to_tensor(const std::vector<VoxelVolume>& batch);
ad::Tensor slices_to_tensor(const std::vector<Slice2D>& batch);

}  // namespace porogen::spgan
