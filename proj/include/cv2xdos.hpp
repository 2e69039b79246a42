#pragma once

#include "cv2xdos/sim_time.hpp"
#include "cv2xdos/engine.hpp"
#include "cv2xdos/kinematics.hpp"
#include "cv2xdos/messages.hpp"
#include "cv2xdos/traffic.hpp"
#include "cv2xdos/rng.hpp"
#include "cv2xdos/channel.hpp"
#include "cv2xdos/receiver.hpp"
#include "cv2xdos/fcw.hpp"
#include "cv2xdos/metrics.hpp"
#include "cv2xdos/scenario.hpp"
#include "cv2xdos/runner.hpp"
#include "cv2xdos/report.hpp"
#include "cv2xdos/suite.hpp"
#include "cv2xdos/calibrate.hpp"
