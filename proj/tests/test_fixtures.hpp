#pragma once

#include "artpoint/data.hpp"
#include "artpoint/defense.hpp"
#include "artpoint/nn.hpp"

namespace artpoint::testing {

// Desk-size dataset shared across test cases; generated once.
inline const Dataset& small_dataset() {
  static const Dataset ds = [] {
    SyntheticConfig cfg;
    cfg.train_per_class = 12;
    cfg.test_per_class = 4;
    cfg.points_per_cloud = 64;
    return gen_synthetic(cfg, 20240001);
  }();
  return ds;
}

inline Architecture small_arch() {
  Architecture arch;
  arch.h1 = 32;
  arch.h2 = 64;
  arch.h3 = 32;
  arch.k = 8;
  return arch;
}

// Clean-trained on the small dataset; enough epochs to be clearly better
// than chance so attacks have something to break.
inline const ClassifierParams& small_trained_model() {
  static const ClassifierParams params = [] {
    TrainConfig cfg;
    cfg.epochs = 30;
    cfg.lr = 0.02;
    return clean_train(init_params(small_arch(), 11), small_dataset(), cfg, 22);
  }();
  return params;
}

}  // namespace artpoint::testing
