//! Synthetic desk-scale dataset: a rotating dayside TEC field driven by a
//! seeded Kp/F10.7/solar-wind process, with a consistent storm catalog.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::astro::{dipole_maps, forcing_frame, DipoleConfig, UnixTime};
use crate::error::Result;
use crate::mesh::LatLonGrid;
use crate::tensor::{kernels, Tensor};

use super::channels::{default_channel_spec, SYNTH_DRIVERS};
use super::drivers::{align_drivers, AlignPolicy, DriverSeries};
use super::events::{Event, EventCatalog, GLevel};
use super::frame::{Dataset, StateFrame};
use super::iongrid::GridStack;

#[derive(Clone, Debug)]
pub struct SynthConfig {
    pub n_lat: usize,
    pub n_lon: usize,
    pub days: u32,
    pub seed: u64,
    pub cadence_s: u32,
    pub start: UnixTime,
    /// Expected storm count per 30 days.
    pub storm_rate_per_30d: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_lat: 18,
            n_lon: 36,
            days: 60,
            seed: 7,
            cadence_s: 900,
            start: 1_425_600_000, // 2015-03-06T00:00:00Z
            storm_rate_per_30d: 7.0,
        }
    }
}

pub struct SynthOutput {
    pub dataset: Dataset,
    pub catalog: EventCatalog,
    pub driver_series: Vec<DriverSeries>,
    /// TEC-only stack, the map file `synth` writes to disk.
    pub tec_stack: GridStack,
}

struct Storm {
    onset: UnixTime,
    duration_s: i64,
    rise_s: i64,
    peak_kp: f64,
}

impl Storm {
    /// 0..1 activity shape: linear rise, exponential decay.
    fn shape(&self, t: UnixTime) -> f64 {
        if t < self.onset {
            return 0.0;
        }
        let dt = (t - self.onset) as f64;
        let rise = self.rise_s as f64;
        if dt <= rise {
            dt / rise
        } else {
            (-(dt - rise) / (self.duration_s as f64 * 0.45)).exp()
        }
    }
}

fn storm_activity(storms: &[Storm], t: UnixTime) -> f64 {
    storms.iter().map(|s| s.shape(t) * s.peak_kp).fold(0.0, f64::max)
}

struct Ou {
    state: f64,
    rho: f64,
    sigma: f64,
    rng: ChaCha8Rng,
}

impl Ou {
    fn new(seed: u64, rho: f64, sigma: f64) -> Self {
        Ou { state: 0.0, rho, sigma, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn step(&mut self) -> f64 {
        let eps: f64 = self.rng.random::<f64>() * 2.0 - 1.0;
        self.state = self.rho * self.state + self.sigma * eps;
        self.state
    }
}

fn series(
    name: &str,
    cadence: u32,
    policy: AlignPolicy,
    timestamps: Vec<UnixTime>,
    values: Vec<f64>,
) -> DriverSeries {
    DriverSeries {
        name: name.into(),
        timestamps,
        values,
        units: String::new(),
        native_cadence_s: cadence,
        policy,
        max_gap_s: None,
    }
}

/// TEC field formula (noise-free part); also the oracle the tests recompute.
pub fn tec_formula(amplitude: f64, zenith_cos: f64, maglat_deg: f64) -> f64 {
    let dayside = zenith_cos.max(0.0).powf(0.9);
    let bulge = 1.0 + 0.6 * (-(maglat_deg / 12.0) * (maglat_deg / 12.0)).exp();
    amplitude * dayside * bulge
}

/// Amplitude in TECU as a function of the driver state.
pub fn tec_amplitude(f107: f64, kp: f64) -> f64 {
    16.0 * (0.7 + 0.3 * f107 / 150.0) * (1.0 + 0.12 * kp)
}

pub fn synth_dataset(cfg: &SynthConfig) -> Result<SynthOutput> {
    let grid = LatLonGrid::new(cfg.n_lat, cfg.n_lon)?;
    let spec = default_channel_spec(2.0);
    let n_steps = (cfg.days as i64 * 86_400 / cfg.cadence_s as i64) as usize;
    let end = cfg.start + n_steps as i64 * cfg.cadence_s as i64;

    // -- storm schedule ------------------------------------------------
    let mut storm_rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5701);
    let expected = cfg.storm_rate_per_30d * cfg.days as f64 / 30.0;
    let n_storms = expected.round() as usize;
    let mut storms = Vec::with_capacity(n_storms);
    for _ in 0..n_storms {
        let onset = cfg.start
            + storm_rng.random_range(43_200..(n_steps as i64 * cfg.cadence_s as i64 - 172_800));
        let duration_s = storm_rng.random_range(12 * 3600..48 * 3600);
        let rise_s = storm_rng.random_range(2 * 3600..6 * 3600);
        let level: f64 = storm_rng.random::<f64>();
        let peak_kp = if level < 0.38 {
            5.3
        } else if level < 0.65 {
            6.3
        } else if level < 0.83 {
            7.3
        } else if level < 0.94 {
            8.3
        } else {
            9.0
        };
        storms.push(Storm { onset, duration_s, rise_s, peak_kp });
    }
    storms.sort_by_key(|s| s.onset);

    // -- native driver series -------------------------------------------
    let three_h = 10_800i64;
    let day = 86_400i64;
    let kp_times: Vec<UnixTime> = {
        let first = cfg.start - cfg.start.rem_euclid(three_h);
        (0..).map(|i| first + i * three_h).take_while(|&t| t < end + three_h).collect()
    };
    let mut kp_ou = Ou::new(cfg.seed ^ 0x5702, 0.85, 0.45);
    let kp_vals: Vec<f64> = kp_times
        .iter()
        .map(|&t| {
            let quiet = (1.7 + kp_ou.step()).clamp(0.0, 4.4);
            quiet.max(storm_activity(&storms, t)).clamp(0.0, 9.0)
        })
        .collect();
    let ap_vals: Vec<f64> = kp_vals.iter().map(|&kp| 2.5 * ((kp / 1.75).exp() - 1.0)).collect();

    let f107_times: Vec<UnixTime> = {
        let first = cfg.start - cfg.start.rem_euclid(day);
        (0..).map(|i| first + i * day).take_while(|&t| t < end + day).collect()
    };
    let mut f_ou = Ou::new(cfg.seed ^ 0x5703, 0.8, 6.0);
    let f107_vals: Vec<f64> = f107_times
        .iter()
        .map(|&t| {
            let phase = (t as f64 / 86_400.0) / 27.0 * std::f64::consts::TAU;
            (120.0 + 45.0 * phase.sin() + f_ou.step()).clamp(65.0, 240.0)
        })
        .collect();
    let ema = |alpha: f64, scale: f64, offset: f64| -> Vec<f64> {
        let mut state = f107_vals[0];
        f107_vals
            .iter()
            .map(|&v| {
                state = alpha * v + (1.0 - alpha) * state;
                scale * state + offset
            })
            .collect()
    };
    let s107_vals = ema(0.3, 0.9, 12.0);
    let m107_vals = ema(0.15, 1.05, -5.0);
    let y107_vals = ema(0.08, 0.95, 3.0);

    let wind_times: Vec<UnixTime> = (0..)
        .map(|i| cfg.start + i * cfg.cadence_s as i64)
        .take_while(|&t| t < end + cfg.cadence_s as i64)
        .collect();
    let mut ous: Vec<Ou> = (0..6)
        .map(|i| Ou::new(cfg.seed ^ (0x5710 + i as u64), 0.97, 0.24))
        .collect();
    let mut vx = Vec::with_capacity(wind_times.len());
    let mut vy = Vec::with_capacity(wind_times.len());
    let mut vz = Vec::with_capacity(wind_times.len());
    let mut bx = Vec::with_capacity(wind_times.len());
    let mut by = Vec::with_capacity(wind_times.len());
    let mut bz = Vec::with_capacity(wind_times.len());
    for &t in &wind_times {
        let act = storm_activity(&storms, t) / 9.0;
        vx.push(-(380.0 + 40.0 * ous[0].step() + 260.0 * act));
        vy.push(15.0 * ous[1].step());
        vz.push(12.0 * ous[2].step());
        bx.push(3.0 * ous[3].step());
        by.push(4.0 * ous[4].step());
        bz.push(2.5 * ous[5].step() - 11.0 * act);
    }

    let driver_series = vec![
        series("kp", 10_800, AlignPolicy::HoldPrevious, kp_times.clone(), kp_vals.clone()),
        series("ap", 10_800, AlignPolicy::HoldPrevious, kp_times.clone(), ap_vals),
        series("f107", 86_400, AlignPolicy::HoldPrevious, f107_times.clone(), f107_vals),
        series("s107", 86_400, AlignPolicy::HoldPrevious, f107_times.clone(), s107_vals),
        series("m107", 86_400, AlignPolicy::HoldPrevious, f107_times.clone(), m107_vals),
        series("y107", 86_400, AlignPolicy::HoldPrevious, f107_times, y107_vals),
        series("bx", cfg.cadence_s, AlignPolicy::LinearInterpolate, wind_times.clone(), bx),
        series("by", cfg.cadence_s, AlignPolicy::LinearInterpolate, wind_times.clone(), by),
        series("bz", cfg.cadence_s, AlignPolicy::LinearInterpolate, wind_times.clone(), bz),
        series("vx", cfg.cadence_s, AlignPolicy::LinearInterpolate, wind_times.clone(), vx),
        series("vy", cfg.cadence_s, AlignPolicy::LinearInterpolate, wind_times.clone(), vy),
        series("vz", cfg.cadence_s, AlignPolicy::LinearInterpolate, wind_times, vz),
    ];
    debug_assert_eq!(driver_series.len(), SYNTH_DRIVERS.len());

    let aligned = align_drivers(&driver_series, cfg.cadence_s, cfg.start, n_steps)?;

    // -- event catalog -----------------------------------------------------
    let mut events = Vec::new();
    for s in &storms {
        let end_t = s.onset + s.duration_s;
        let realized = kp_times
            .iter()
            .zip(&kp_vals)
            .filter(|(&t, _)| t >= s.onset && t <= end_t)
            .map(|(_, &v)| v)
            .fold(0.0, f64::max);
        events.push(Event { start: s.onset, end: end_t, g_level: GLevel::from_kp(realized) });
    }
    // quiet reference windows between storms
    let mut quiet_rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5720);
    let mut tries = 0;
    let mut quiet_added = 0usize;
    let want_quiet = (cfg.days / 12).max(2) as usize;
    while quiet_added < want_quiet && tries < 200 {
        tries += 1;
        let t0 = cfg.start + quiet_rng.random_range(0..(n_steps as i64 - 96) * cfg.cadence_s as i64);
        let t1 = t0 + day;
        let clear = storms.iter().all(|s| t1 < s.onset || t0 > s.onset + 2 * s.duration_s);
        if clear && t1 < end {
            events.push(Event { start: t0, end: t1, g_level: GLevel::G0 });
            quiet_added += 1;
        }
    }
    let catalog = EventCatalog::new(events)?;

    // -- frames -------------------------------------------------------------
    let dipole = dipole_maps(&grid, &DipoleConfig::default());
    let n_nodes = grid.n_nodes();
    let forcings = spec.computed_forcings();

    // AR(1) noise on a coarse grid, bilinearly upsampled
    let coarse_h = cfg.n_lat.div_ceil(3).max(2);
    let coarse_w = cfg.n_lon.div_ceil(3).max(2);
    let mut noise_rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5730);
    let mut coarse = vec![0.0f64; coarse_h * coarse_w];

    let c_total = spec.len();
    let mut data = Vec::with_capacity(n_steps * c_total * n_nodes);
    let mut timestamps = Vec::with_capacity(n_steps);
    let mut tec_frames = Vec::with_capacity(n_steps);

    let kp_idx = aligned.names.iter().position(|n| n == "kp").unwrap();
    let f107_idx = aligned.names.iter().position(|n| n == "f107").unwrap();

    for step in 0..n_steps {
        let t = cfg.start + step as i64 * cfg.cadence_s as i64;
        timestamps.push(t);
        let forcing = forcing_frame(t, &grid, &forcings)?;
        let sza = forcing.channel(crate::astro::ForcingChannel::SolarZenithCos).unwrap();

        // advance the noise field
        for v in coarse.iter_mut() {
            *v = 0.95 * *v + 0.35 * (noise_rng.random::<f64>() * 2.0 - 1.0);
        }
        let coarse_t =
            Tensor::from_vec(&[1, coarse_h, coarse_w], coarse.clone()).expect("noise buffer");
        let up = kernels::upsample_bilinear(&coarse_t, 3).expect("factor 3");
        let noise = kernels::crop_hw(&up, cfg.n_lat, cfg.n_lon).expect("crop to grid");

        let amp = tec_amplitude(aligned.values[step][f107_idx], aligned.values[step][kp_idx]);

        for (ci, ch) in spec.channels().iter().enumerate() {
            debug_assert_eq!(ci, spec.index_of(&ch.name).unwrap());
            match ch.name.as_str() {
                "tec" => {
                    for node in 0..n_nodes {
                        let v = tec_formula(amp, sza[node], dipole.maglat_deg[node])
                            + 0.8 * noise.data()[node];
                        data.push(v as f32);
                    }
                }
                "maglat_n" => data.extend(dipole.maglat_deg.iter().map(|&v| (v / 90.0) as f32)),
                "maglon_sin" => data.extend(dipole.maglon_sin.iter().map(|&v| v as f32)),
                "maglon_cos" => data.extend(dipole.maglon_cos.iter().map(|&v| v as f32)),
                name => {
                    if let Some(di) = aligned.names.iter().position(|n| n == name) {
                        let v = aligned.values[step][di] as f32;
                        data.extend(std::iter::repeat_n(v, n_nodes));
                    } else {
                        let f = crate::astro::ForcingChannel::from_name(name)?;
                        data.extend(forcing.channel(f).unwrap().iter().map(|&v| v as f32));
                    }
                }
            }
        }
        let tec_plane =
            &data[step * c_total * n_nodes..step * c_total * n_nodes + n_nodes];
        tec_frames.push(StateFrame {
            t,
            values: Tensor::from_vec(&[1, cfg.n_lat, cfg.n_lon], tec_plane.to_vec())?,
        });
    }

    let dataset = Dataset::new(spec, grid, cfg.cadence_s, timestamps, data)?;
    let tec_stack = GridStack {
        cadence_s: cfg.cadence_s,
        channel_names: vec!["tec".into()],
        h: cfg.n_lat,
        w: cfg.n_lon,
        frames: tec_frames,
    };
    Ok(SynthOutput { dataset, catalog, driver_series, tec_stack })
}
