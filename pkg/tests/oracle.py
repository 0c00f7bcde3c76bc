"""Straight-line reference implementation of the forward model, for tests only.

Written independently of the package: plain ``math``, one statement per
factor, no shared helpers.  Angles in radians, SI units throughout.
"""

import math

MOLAR_MASS_WATER = 0.01801528


def sand_force(rho, g, w, l, d, beta, v):
    a = rho * g * w * l**1.5
    b = beta**1.73
    c = math.sqrt(d)
    e = (d / (l * math.sin(beta))) ** 0.77
    bracket = 1.05 * (d / w) ** 1.11 + 1.26 * v * v / (g * l) + 3.91
    return a * b * c * e * bracket


def clay_force(rho, g, coh, w, l, d, beta, v):
    a = rho * g * w * l**1.5
    b = beta**1.15
    c = math.sqrt(d)
    e = (d / (l * math.sin(beta))) ** 1.21
    cohesive = (11.5 * coh / (rho * g * d)) ** 1.21
    speed = (2.0 * v / (3.0 * w)) ** 0.121
    shape = 0.055 * (d / w) ** 0.78 + 0.065
    bracket = cohesive * speed * shape + 0.64 * (v * v / (g * l))
    return a * b * c * e * bracket


def forward(x, env, eff, fill, req, q_e=23710.0, convention="as_printed"):
    """Evaluate one design.

    x: dict with wheel_count, bucket_count, wheel_diameter, bucket_width,
       cut_face_length, penetration_depth, rake_angle, cut_velocity,
       excavation_time, heating_time, electrolysis_time
    env: dict rho, g, c, cp, ts, text, wfr
    eff: dict bat, solar, motor, drive, water, h, o
    req: dict m_req (kg), p_max (W), weight
    """
    div = convention == "divide"
    f_sand = sand_force(env["rho"], env["g"], x["bucket_width"], x["cut_face_length"],
                        x["penetration_depth"], x["rake_angle"], x["cut_velocity"])
    f_clay = clay_force(env["rho"], env["g"], env["c"], x["bucket_width"], x["cut_face_length"],
                        x["penetration_depth"], x["rake_angle"], x["cut_velocity"])
    f_cut = f_sand + f_clay

    volume = fill / 2.0 * x["bucket_width"] * x["cut_face_length"] ** 2 * math.sin(math.pi / 3.0)
    n_rot = x["cut_velocity"] * x["excavation_time"] / (math.pi * x["wheel_diameter"])
    m_net = n_rot * x["wheel_count"] * x["bucket_count"] * env["rho"] * volume

    chain = eff["bat"] * eff["drive"] * eff["motor"]
    raw_exc = n_rot * x["wheel_count"] * f_cut * x["cut_velocity"]
    p_exc = raw_exc / chain if div else chain * raw_exc

    m_water = eff["water"] * m_net * env["wfr"]
    raw_heat = m_net * env["cp"] * (env["text"] - env["ts"]) / x["heating_time"]
    p_heat = raw_heat / eff["bat"] if div else eff["bat"] * raw_heat

    m_h = 0.1119 * eff["h"] * m_water
    m_o = 0.8879 * eff["o"] * m_water
    n_water = m_water / MOLAR_MASS_WATER
    raw_elec = n_water * q_e / x["electrolysis_time"]
    p_elec = raw_elec / eff["bat"] if div else eff["bat"] * raw_elec

    total = p_exc + p_heat + p_elec
    p_solar = total / eff["solar"] if div else eff["solar"] * total
    t_net = x["excavation_time"] + x["heating_time"] + x["electrolysis_time"]

    kw = p_solar / 1000.0
    cost = ((req["p_max"] - p_solar) / 1000.0) ** 2 + req["weight"] * (req["m_req"] - m_water) ** 2
    return {
        "sand_force": f_sand, "clay_force": f_clay, "cut_force": f_cut,
        "single_cut_volume": volume, "rotations": n_rot, "regolith_mass": m_net,
        "water_mass": m_water, "hydrogen_mass": m_h, "oxygen_mass": m_o, "water_moles": n_water,
        "excavation_power": p_exc, "heating_power": p_heat, "electrolysis_power": p_elec,
        "solar_power": p_solar, "total_time": t_net,
        "m1": m_net / kw, "m2": m_water / kw, "m3": m_h / kw, "m4": m_o / kw,
        "water_rate": m_water / (t_net / 3600.0) / kw,
        "cost": cost,
    }


BASELINE_ENV = dict(rho=1876.0, g=0.0057, c=147.0, cp=1430.0, ts=200.0, text=1000.0, wfr=0.10)
BASELINE_EFF = dict(bat=0.75, solar=0.29, motor=0.70, drive=0.70, water=0.90, h=0.90, o=0.90)
BASELINE_REQ = dict(m_req=7.5, p_max=10_000.0, weight=0.1)
BASELINE_FILL = 0.45


if __name__ == "__main__":
    # Frozen values in the test-suite were printed by this block.
    beta = math.radians(10.0)
    args = (1876.0, 0.0057, 0.063, 0.05, 0.011, beta, 0.13)
    print("sand", repr(sand_force(*args)))
    print("clay", repr(clay_force(1876.0, 0.0057, 147.0, 0.063, 0.05, 0.011, beta, 0.13)))
    print("clay 2w", repr(clay_force(1876.0, 0.0057, 147.0, 0.126, 0.05, 0.011, beta, 0.13)))
    f_cut = sand_force(*args) + clay_force(1876.0, 0.0057, 147.0, 0.063, 0.05, 0.011, beta, 0.13)
    print("cut", repr(f_cut))
    print("p_exc", repr(0.75 * 0.70 * 0.70 * 11.5 * 2 * f_cut * 0.13))
    print("volume", repr(0.45 / 2 * 0.063 * 0.0811**2 * math.sin(math.pi / 3)))
