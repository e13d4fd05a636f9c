#include <vector>

#include "catgan/ops.hpp"
#include "kernels.hpp"

namespace catgan::ops {

namespace {

void check_filter(const Shape& filter, const char* op) {
  if (filter.size() != 4) {
    throw ShapeError(std::string(op) + ": filter must be [kH,kW,inC,outC], got " + to_string(filter));
  }
}

// Geometry of the convolution mapping `input` (NHWC) through `filter`.
detail::ConvGeometry forward_geometry(const Shape& input, const Shape& filter,
                                      const ConvOptions& opt) {
  if (input.size() != 4) throw ShapeError("conv2d: input must be NHWC, got " + to_string(input));
  check_filter(filter, "conv2d");
  if (input[3] != filter[2]) {
    throw ShapeError("conv2d: input channels of " + to_string(input) + " do not match filter " +
                     to_string(filter));
  }
  detail::ConvGeometry geo{};
  geo.batch = input[0];
  geo.height = input[1];
  geo.width = input[2];
  geo.channels = input[3];
  geo.kernel_h = filter[0];
  geo.kernel_w = filter[1];
  geo.stride_h = opt.stride_h;
  geo.stride_w = opt.stride_w;
  geo.out_height = conv_output_extent(geo.height, geo.kernel_h, geo.stride_h, opt.padding);
  geo.out_width = conv_output_extent(geo.width, geo.kernel_w, geo.stride_w, opt.padding);
  geo.pad_top = conv_padding(geo.height, geo.out_height, geo.kernel_h, geo.stride_h, opt.padding).before;
  geo.pad_left = conv_padding(geo.width, geo.out_width, geo.kernel_w, geo.stride_w, opt.padding).before;
  return geo;
}

}  // namespace

template <typename T>
Var conv2d(Graph<T>& g, Var x, Var filter, const ConvOptions& opt) {
  const Tensor<T>& xv = g.value(x);
  const Tensor<T>& fv = g.value(filter);
  const detail::ConvGeometry geo = forward_geometry(xv.shape(), fv.shape(), opt);
  const std::size_t out_channels = fv.extent(3);
  const std::size_t rows = geo.patch_count(), patch = geo.patch_size();

  std::vector<T> cols(rows * patch);
  detail::im2col(xv.data(), geo, cols.data());
  Tensor<T> out({geo.batch, geo.out_height, geo.out_width, out_channels});
  detail::as_matrix(out.data(), rows, out_channels).noalias() =
      detail::as_matrix<T>(cols.data(), rows, patch) *
      detail::as_matrix(fv.data(), patch, out_channels);

  return g.record("conv2d", std::move(out), {x, filter},
                  [x, filter, geo, out_channels](Graph<T>& gr, Var self) {
                    const std::size_t rows = geo.patch_count(), patch = geo.patch_size();
                    auto dy = detail::as_matrix(gr.grad(self).data(), rows, out_channels);
                    if (Tensor<T>* df = gr.grad_slot(filter)) {
                      std::vector<T> cols(rows * patch);
                      detail::im2col(gr.value(x).data(), geo, cols.data());
                      detail::as_matrix(df->data(), patch, out_channels).noalias() +=
                          detail::as_matrix<T>(cols.data(), rows, patch).transpose() * dy;
                    }
                    if (Tensor<T>* dx = gr.grad_slot(x)) {
                      std::vector<T> dcols(rows * patch);
                      detail::as_matrix(dcols.data(), rows, patch).noalias() =
                          dy * detail::as_matrix(gr.value(filter).data(), patch, out_channels).transpose();
                      detail::col2im(dcols.data(), geo, dx->data());
                    }
                  });
}

template <typename T>
Var conv2d_transpose(Graph<T>& g, Var x, Var filter, const ConvOptions& opt) {
  const Tensor<T>& xv = g.value(x);
  const Tensor<T>& fv = g.value(filter);
  if (xv.rank() != 4) throw ShapeError("conv2d_transpose: input must be NHWC, got " + to_string(xv.shape()));
  check_filter(fv.shape(), "conv2d_transpose");
  if (xv.extent(3) != fv.extent(3)) {
    throw ShapeError("conv2d_transpose: input channels of " + to_string(xv.shape()) +
                     " do not match filter " + to_string(fv.shape()));
  }
  // The output of this op is the input of the adjoint convolution.
  const Shape out_shape{xv.extent(0),
                        conv_transpose_output_extent(xv.extent(1), fv.extent(0), opt.stride_h, opt.padding),
                        conv_transpose_output_extent(xv.extent(2), fv.extent(1), opt.stride_w, opt.padding),
                        fv.extent(2)};
  const detail::ConvGeometry geo = forward_geometry(out_shape, fv.shape(), opt);
  if (geo.out_height != xv.extent(1) || geo.out_width != xv.extent(2)) {
    throw ShapeError("conv2d_transpose: inconsistent geometry for input " + to_string(xv.shape()));
  }
  const std::size_t in_channels = fv.extent(3);
  const std::size_t rows = geo.patch_count(), patch = geo.patch_size();

  std::vector<T> cols(rows * patch);
  detail::as_matrix(cols.data(), rows, patch).noalias() =
      detail::as_matrix(xv.data(), rows, in_channels) *
      detail::as_matrix(fv.data(), patch, in_channels).transpose();
  Tensor<T> out(out_shape);
  detail::col2im(cols.data(), geo, out.data());

  return g.record("conv2d_transpose", std::move(out), {x, filter},
                  [x, filter, geo, in_channels](Graph<T>& gr, Var self) {
                    const std::size_t rows = geo.patch_count(), patch = geo.patch_size();
                    std::vector<T> dcols(rows * patch);
                    detail::im2col(gr.grad(self).data(), geo, dcols.data());
                    auto dcols_m = detail::as_matrix<T>(dcols.data(), rows, patch);
                    if (Tensor<T>* dx = gr.grad_slot(x)) {
                      detail::as_matrix(dx->data(), rows, in_channels).noalias() +=
                          dcols_m * detail::as_matrix(gr.value(filter).data(), patch, in_channels);
                    }
                    if (Tensor<T>* df = gr.grad_slot(filter)) {
                      detail::as_matrix(df->data(), patch, in_channels).noalias() +=
                          dcols_m.transpose() * detail::as_matrix(gr.value(x).data(), rows, in_channels);
                    }
                  });
}

template Var conv2d<float>(Graph<float>&, Var, Var, const ConvOptions&);
template Var conv2d<double>(Graph<double>&, Var, Var, const ConvOptions&);
template Var conv2d_transpose<float>(Graph<float>&, Var, Var, const ConvOptions&);
template Var conv2d_transpose<double>(Graph<double>&, Var, Var, const ConvOptions&);

}  // namespace catgan::ops
