// Entry point: connect form plus the app shell. The service base URL comes
// from ?service= or defaults to the same origin on port 4000.

import { ApiClient } from './api';
import { App } from './app';
import { el } from './views';
import './style.css';

function serviceBase(): string {
  const fromQuery = new URLSearchParams(window.location.search).get('service');
  if (fromQuery) return fromQuery;
  return `http://${window.location.hostname}:4000`;
}

function boot(): void {
  const root = document.getElementById('app');
  if (!root) throw new Error('missing #app element');

  const api = new ApiClient(serviceBase());
  const shell = el('div', {});
  const appRoot = el('div', { id: 'app-root' });

  const raterInput = el('input', { type: 'text', placeholder: 'rater id', value: 'doctor1' });
  const tokenInput = el('input', { type: 'password', placeholder: 'access token' });
  const connectButton = el('button', {}, ['connect']);
  const status = el('span', { class: 'connect-status' });
  const app = new App(appRoot, api);

  connectButton.addEventListener('click', () => {
    status.textContent = 'connecting...';
    app
      .connect(raterInput.value.trim(), tokenInput.value.trim())
      .then(() => {
        status.textContent = `connected as ${raterInput.value.trim()}`;
      })
      .catch((error) => {
        status.textContent = `failed: ${error}`;
      });
  });

  shell.append(
    el('header', { class: 'connect-bar' }, [raterInput, tokenInput, connectButton, status]),
    appRoot,
  );
  root.append(shell);
}

boot();
