#pragma once

#include "lanmsff/core.hpp"
#include "lanmsff/tensor.hpp"
#include "lanmsff/ops.hpp"
#include "lanmsff/gradcheck.hpp"
#include "lanmsff/nn/activation.hpp"
#include "lanmsff/nn/conv.hpp"
#include "lanmsff/nn/dense.hpp"
#include "lanmsff/nn/dropout.hpp"
#include "lanmsff/nn/init.hpp"
#include "lanmsff/nn/loss.hpp"
#include "lanmsff/nn/norm.hpp"
#include "lanmsff/nn/pool.hpp"
#include "lanmsff/nn/shuffle.hpp"
#include "lanmsff/blocks/pwfs.hpp"
#include "lanmsff/blocks/mass_att.hpp"
#include "lanmsff/blocks/stem_block.hpp"
#include "lanmsff/blocks/dual_path_block.hpp"
#include "lanmsff/model/config.hpp"
#include "lanmsff/model/lanmsff.hpp"
#include "lanmsff/model/audit.hpp"
#include "lanmsff/model/serialize.hpp"
#include "lanmsff/train/adam.hpp"
#include "lanmsff/train/schedule.hpp"
#include "lanmsff/train/augment.hpp"
#include "lanmsff/train/kfold.hpp"
#include "lanmsff/train/fit.hpp"
#include "lanmsff/data/schema.hpp"
#include "lanmsff/data/image.hpp"
#include "lanmsff/data/image_io.hpp"
#include "lanmsff/data/csv.hpp"
#include "lanmsff/data/fer2013.hpp"
#include "lanmsff/data/ferplus.hpp"
#include "lanmsff/data/kdef.hpp"
#include "lanmsff/data/pose_subset.hpp"
#include "lanmsff/data/cache.hpp"
#include "lanmsff/data/synthetic.hpp"
#include "lanmsff/eval/metrics.hpp"
#include "lanmsff/eval/confusion.hpp"
#include "lanmsff/eval/evaluate.hpp"
#include "lanmsff/eval/grad_cam.hpp"
