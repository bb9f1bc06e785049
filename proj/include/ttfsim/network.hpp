#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ttfsim {

/// Dense row-major grid. For weight matrices, rows index pre-synaptic
/// neurons and columns index post-synaptic neurons.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), v_(rows * cols, fill) {}

  T& operator()(std::size_t i, std::size_t j) { return v_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return v_[i * cols_ + j]; }

  std::span<T> row(std::size_t i) { return {v_.data() + i * cols_, cols_}; }
  std::span<const T> row(std::size_t i) const { return {v_.data() + i * cols_, cols_}; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return v_.size(); }

  std::vector<T>& values() { return v_; }
  const std::vector<T>& values() const { return v_; }

  bool operator==(const Grid&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> v_;
};

using Matrix = Grid<double>;

/// Fully connected feed-forward spiking network. Thresholds and the alive
/// mask are stored per non-input layer (index l-1 holds layer l); an empty
/// alive mask means every neuron works. Dead neurons integrate input but
/// never emit a spike.
struct Network {
  std::vector<int> layer_sizes;
  std::vector<Matrix> weights;                   // weights[l]: layer l -> layer l+1
  std::vector<std::vector<double>> thresholds;   // thresholds[l]: layer l+1
  std::vector<std::vector<std::uint8_t>> alive;  // alive[l]: layer l+1; empty = all alive

  static Network with_shape(std::vector<int> sizes, double v_th);

  std::size_t layer_count() const { return layer_sizes.size(); }
  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }

  bool is_alive(std::size_t layer, std::size_t j) const {
    return alive.empty() || alive[layer - 1].empty() || alive[layer - 1][j] != 0;
  }

  void set_uniform_thresholds(double v_th);

  /// Checks that weight shapes chain with layer_sizes and thresholds are
  /// positive. Called on construction paths; injected networks may carry
  /// zero thresholds afterwards.
  void validate() const;
};

}  // namespace ttfsim
