#pragma once

namespace psychoak {

// Critical-band rate (Bark) from frequency, Zwicker & Terhardt approximation.
double hz_to_bark(double f_hz);

// Inverse of hz_to_bark, solved by bisection.
double bark_to_hz(double z);

}  // namespace psychoak
