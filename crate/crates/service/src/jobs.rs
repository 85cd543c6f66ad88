//! In-memory store of uploaded networks and jobs.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, MutexGuard};
use std::time::{SystemTime, UNIX_EPOCH};

use ergm_core::estimation::FitResult;
use ergm_core::io::{ResultBody, ResultDocument};
use ergm_core::sampler::RunHandle;
use ergm_core::selection::CandidateSet;
use ergm_core::{Error, ErrorClass, ModelSpec};
use serde::{Deserialize, Serialize};
use tokio::sync::Semaphore;

use crate::engine::{self, default_tau, JobControl, Network};

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Jobs allowed to run at once; the rest wait in the queue.
    pub workers: usize,
    /// Finished result documents are also written here when set.
    pub results_dir: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            workers: 2,
            results_dir: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JobKind {
    Fit,
    Gof,
    Simulate,
    Select,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JobStatus {
    Queued,
    Running,
    Done,
    Failed,
}

impl JobStatus {
    pub fn is_terminal(self) -> bool {
        matches!(self, JobStatus::Done | JobStatus::Failed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobRequest {
    pub kind: JobKind,
    pub network_id: String,
    /// Model terms; candidate terms for select jobs.
    #[serde(default)]
    pub terms: Option<String>,
    /// Decay for weighted terms given without one.
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default)]
    pub theta: Option<Vec<f64>>,
    /// Finished fit job whose estimates a gof job should use.
    #[serde(default)]
    pub fit_job: Option<String>,
    #[serde(default)]
    pub control: JobControl,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobError {
    pub class: String,
    pub code: String,
    pub message: String,
}

impl JobError {
    pub fn from_error(e: &Error) -> Self {
        JobError {
            class: e.class().as_str().into(),
            code: e.code().into(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobView {
    pub id: String,
    pub kind: JobKind,
    pub status: JobStatus,
    pub progress: f64,
    pub submitted_ms: u64,
    pub started_ms: Option<u64>,
    pub finished_ms: Option<u64>,
    pub request: JobRequest,
    pub error: Option<JobError>,
    /// Path of the result document once done.
    pub result: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkView {
    pub id: String,
    pub name: Option<String>,
    pub nodes: usize,
    pub edges: usize,
    pub density: f64,
    pub attribute: Option<String>,
    pub warnings: Vec<String>,
}

/// Errors of the store, mapped onto HTTP statuses by the router.
#[derive(Debug)]
pub enum StoreError {
    BadRequest(Error),
    NotFound(String),
    Conflict(String),
    Invalid(Error),
}

impl StoreError {
    /// Sorts an engine error raised while checking a submission.
    fn from_validation(e: Error) -> Self {
        match e.class() {
            ErrorClass::Model => StoreError::Invalid(e),
            _ if matches!(e, Error::TermParse(_) | Error::MissingAttribute(_)) => StoreError::Invalid(e),
            _ => StoreError::BadRequest(e),
        }
    }
}

struct NetworkEntry {
    view: NetworkView,
    network: Arc<Network>,
}

struct JobEntry {
    view: JobView,
    handle: RunHandle,
    result: Option<Arc<str>>,
    plot: Option<Arc<str>>,
    fit: Option<Arc<FitResult>>,
}

/// A submission resolved against the store, ready to run.
enum Prepared {
    Fit(ModelSpec),
    Gof { model: ModelSpec, theta: Vec<f64>, fit: Option<Arc<FitResult>> },
    Simulate { model: ModelSpec, theta: Vec<f64> },
    Select(CandidateSet),
}

#[derive(Default)]
struct Inner {
    networks: BTreeMap<String, NetworkEntry>,
    jobs: BTreeMap<String, JobEntry>,
    next_network: u64,
    next_job: u64,
}

/// Shared service state. Cloning is cheap.
#[derive(Clone)]
pub struct Store {
    inner: Arc<Mutex<Inner>>,
    workers: Arc<Semaphore>,
    config: Arc<ServiceConfig>,
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64)
}

impl Store {
    pub fn new(config: ServiceConfig) -> Self {
        Store {
            inner: Arc::default(),
            workers: Arc::new(Semaphore::new(config.workers.max(1))),
            config: Arc::new(config),
        }
    }

    fn lock(&self) -> MutexGuard<'_, Inner> {
        self.inner.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn add_network(&self, name: Option<String>, network: Network, warnings: Vec<String>) -> NetworkView {
        let mut inner = self.lock();
        inner.next_network += 1;
        let id = format!("net-{}", inner.next_network);
        let g = &network.graph;
        let view = NetworkView {
            id: id.clone(),
            name,
            nodes: g.node_count(),
            edges: g.edge_count(),
            density: g.density(),
            attribute: network.attrs.as_ref().map(|a| a.name.clone()),
            warnings,
        };
        inner.networks.insert(
            id,
            NetworkEntry {
                view: view.clone(),
                network: Arc::new(network),
            },
        );
        view
    }

    pub fn networks(&self) -> Vec<NetworkView> {
        self.lock().networks.values().map(|e| e.view.clone()).collect()
    }

    pub fn network(&self, id: &str) -> Option<NetworkView> {
        self.lock().networks.get(id).map(|e| e.view.clone())
    }

    pub fn jobs(&self) -> Vec<JobView> {
        self.lock().jobs.values().map(view_of).collect()
    }

    pub fn job(&self, id: &str) -> Option<JobView> {
        self.lock().jobs.get(id).map(view_of)
    }

    /// Jobs queued or running.
    pub fn queue_depth(&self) -> usize {
        self.lock()
            .jobs
            .values()
            .filter(|j| !j.view.status.is_terminal())
            .count()
    }

    /// Validates a request and queues it. Must be called inside a tokio
    /// runtime.
    pub fn submit(&self, request: JobRequest) -> Result<JobView, StoreError> {
        let (network, prepared) = self.prepare(&request)?;
        let handle = RunHandle::new();
        let view = {
            let mut inner = self.lock();
            inner.next_job += 1;
            let id = format!("job-{}", inner.next_job);
            let view = JobView {
                id: id.clone(),
                kind: request.kind,
                status: JobStatus::Queued,
                progress: 0.0,
                submitted_ms: now_ms(),
                started_ms: None,
                finished_ms: None,
                request: request.clone(),
                error: None,
                result: None,
            };
            inner.jobs.insert(
                id,
                JobEntry {
                    view: view.clone(),
                    handle: handle.clone(),
                    result: None,
                    plot: None,
                    fit: None,
                },
            );
            view
        };
        let store = self.clone();
        let id = view.id.clone();
        tokio::spawn(async move {
            let Ok(_permit) = store.workers.clone().acquire_owned().await else { return };
            if !store.start(&id) {
                return;
            }
            let mut control = request.control.clone();
            control.attach(&handle);
            let outcome = tokio::task::spawn_blocking(move || execute(&prepared, &request, &network, &control))
                .await
                .unwrap_or_else(|e| Err(Error::InvalidInput(format!("job panicked: {e}"))));
            store.finish(&id, outcome);
        });
        Ok(view)
    }

    fn prepare(&self, request: &JobRequest) -> Result<(Arc<Network>, Prepared), StoreError> {
        let inner = self.lock();
        let network = inner
            .networks
            .get(&request.network_id)
            .map(|e| e.network.clone())
            .ok_or_else(|| StoreError::NotFound(format!("network `{}`", request.network_id)))?;
        let (n, attrs) = (network.graph.node_count(), network.attrs());
        let v = StoreError::from_validation;
        request.control.estimation().validate().map_err(StoreError::BadRequest)?;
        request.control.simulation().validate().map_err(StoreError::BadRequest)?;
        let model = |required: bool| -> Result<Option<ModelSpec>, StoreError> {
            match &request.terms {
                Some(t) => {
                    let m = engine::parse_model(t, request.tau).map_err(v)?;
                    m.check(n, attrs).map_err(v)?;
                    Ok(Some(m))
                }
                None if required => Err(StoreError::BadRequest(Error::Schema("`terms` is required".into()))),
                None => Ok(None),
            }
        };
        let theta_for = |m: &ModelSpec| -> Result<Vec<f64>, StoreError> {
            let theta = request
                .theta
                .clone()
                .ok_or_else(|| StoreError::BadRequest(Error::Schema("`theta` is required".into())))?;
            if theta.len() != m.len() {
                return Err(StoreError::Invalid(Error::DimensionMismatch {
                    expected: m.len(),
                    got: theta.len(),
                }));
            }
            Ok(theta)
        };
        let prepared = match request.kind {
            JobKind::Fit => Prepared::Fit(model(true)?.unwrap()),
            JobKind::Simulate => {
                let m = model(true)?.unwrap();
                let theta = theta_for(&m)?;
                Prepared::Simulate { model: m, theta }
            }
            JobKind::Gof => match &request.fit_job {
                Some(fit_id) => {
                    let job = inner
                        .jobs
                        .get(fit_id)
                        .ok_or_else(|| StoreError::NotFound(format!("job `{fit_id}`")))?;
                    let fit = job
                        .fit
                        .clone()
                        .ok_or_else(|| StoreError::Conflict(format!("job `{fit_id}` is not a finished fit")))?;
                    if fit.nodes != n {
                        return Err(StoreError::Invalid(Error::ModelMismatch(format!(
                            "fit is for {} nodes, network has {n}",
                            fit.nodes
                        ))));
                    }
                    Prepared::Gof {
                        model: fit.model.clone(),
                        theta: fit.theta_hat.clone(),
                        fit: Some(fit),
                    }
                }
                None => {
                    let m = model(true)?.unwrap();
                    let theta = theta_for(&m)?;
                    Prepared::Gof { model: m, theta, fit: None }
                }
            },
            JobKind::Select => {
                model(false)?;
                let set = engine::candidate_set(request.terms.as_deref(), request.tau, &request.control).map_err(v)?;
                set.validate(n, attrs).map_err(v)?;
                if let Some(models) = &request.control.models {
                    for m in models {
                        engine::parse_model(m, request.tau).map_err(v)?.check(n, attrs).map_err(v)?;
                    }
                }
                Prepared::Select(set)
            }
        };
        Ok((network, prepared))
    }

    /// Moves a queued job to running; false if it was cancelled meanwhile.
    fn start(&self, id: &str) -> bool {
        let mut inner = self.lock();
        match inner.jobs.get_mut(id) {
            Some(job) if job.view.status == JobStatus::Queued => {
                job.view.status = JobStatus::Running;
                job.view.started_ms = Some(now_ms());
                true
            }
            _ => false,
        }
    }

    fn finish(&self, id: &str, outcome: Result<Outcome, Error>) {
        let mut inner = self.lock();
        let Some(job) = inner.jobs.get_mut(id) else { return };
        if job.view.status != JobStatus::Running {
            return;
        }
        job.view.finished_ms = Some(now_ms());
        match outcome {
            Ok(out) => {
                let result: Arc<str> = out.document.to_json().into();
                let plot: Option<Arc<str>> = out.plot.map(|p| p.to_json().into());
                if let Some(dir) = &self.config.results_dir {
                    persist(dir, id, &result, plot.as_deref());
                }
                if let ResultBody::Fit(f) = &out.document.result {
                    job.fit = Some(Arc::new(f.clone()));
                }
                job.result = Some(result);
                job.plot = plot;
                job.view.status = JobStatus::Done;
                job.view.progress = 1.0;
                job.view.result = Some(format!("/v1/jobs/{id}/result"));
            }
            Err(e) => {
                job.view.status = JobStatus::Failed;
                job.view.error = Some(JobError::from_error(&e));
            }
        }
    }

    /// Cancels a job that has not finished.
    pub fn cancel(&self, id: &str) -> Result<JobView, StoreError> {
        let mut inner = self.lock();
        let job = inner
            .jobs
            .get_mut(id)
            .ok_or_else(|| StoreError::NotFound(format!("job `{id}`")))?;
        if job.view.status.is_terminal() {
            return Err(StoreError::Conflict(format!("job `{id}` already {:?}", job.view.status).to_lowercase()));
        }
        job.handle.cancel();
        job.view.progress = job.handle.progress();
        job.view.status = JobStatus::Failed;
        job.view.finished_ms = Some(now_ms());
        job.view.error = Some(JobError::from_error(&Error::Cancelled));
        Ok(job.view.clone())
    }

    /// Result document text of a finished job.
    pub fn result(&self, id: &str) -> Result<Arc<str>, StoreError> {
        self.stored(id, |j| j.result.clone())
    }

    /// Plot-data document text of a finished gof job.
    pub fn plot_data(&self, id: &str) -> Result<Arc<str>, StoreError> {
        self.stored(id, |j| j.plot.clone())
    }

    fn stored(&self, id: &str, pick: impl Fn(&JobEntry) -> Option<Arc<str>>) -> Result<Arc<str>, StoreError> {
        let inner = self.lock();
        let job = inner
            .jobs
            .get(id)
            .ok_or_else(|| StoreError::NotFound(format!("job `{id}`")))?;
        match job.view.status {
            JobStatus::Done => pick(job).ok_or_else(|| StoreError::NotFound(format!("job `{id}` has no such document"))),
            s => Err(StoreError::Conflict(format!("job `{id}` is {s:?}, no result").to_lowercase())),
        }
    }
}

fn view_of(job: &JobEntry) -> JobView {
    let mut v = job.view.clone();
    if v.status == JobStatus::Running {
        v.progress = job.handle.progress();
    }
    v
}

struct Outcome {
    document: ResultDocument,
    plot: Option<ResultDocument>,
}

fn execute(prepared: &Prepared, request: &JobRequest, net: &Network, control: &JobControl) -> Result<Outcome, Error> {
    let seed = control.seed;
    let plain = |document| Outcome { document, plot: None };
    match prepared {
        Prepared::Fit(model) => engine::run_fit(model, net, control).map(plain),
        Prepared::Simulate { model, theta } => {
            engine::run_simulate(model, theta, net.graph.node_count(), net.attrs(), control).map(|(d, _)| plain(d))
        }
        Prepared::Gof { model, theta, fit } => {
            let report = match fit {
                Some(f) => engine::run_gof(f, net, control)?,
                None => engine::run_gof_at(model, theta, net, control)?,
            };
            let (document, plot) = engine::gof_documents(report, seed);
            Ok(Outcome {
                document,
                plot: Some(plot),
            })
        }
        Prepared::Select(set) => engine::run_select(set, request.tau, net, control)
            .map(|t| plain(ResultDocument::new(ResultBody::Selection(t), Some(seed)))),
    }
}

fn persist(dir: &std::path::Path, id: &str, result: &str, plot: Option<&str>) {
    let write = |name: String, text: &str| {
        if let Err(e) = std::fs::create_dir_all(dir).and_then(|_| std::fs::write(dir.join(&name), text)) {
            log::warn!("could not persist {name}: {e}");
        }
    };
    write(format!("{id}.json"), result);
    if let Some(p) = plot {
        write(format!("{id}.plot-data.json"), p);
    }
}
